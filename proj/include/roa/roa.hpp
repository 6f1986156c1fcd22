#pragma once

// Umbrella header: the full estimation toolkit.

#include "roa/bench.hpp"
#include "roa/contour.hpp"
#include "roa/kernels.hpp"
#include "roa/lyap.hpp"
#include "roa/poly.hpp"
#include "roa/sdp.hpp"
#include "roa/shapes.hpp"
#include "roa/sos.hpp"
#include "roa/verify.hpp"
#include "roa/vsiter.hpp"
