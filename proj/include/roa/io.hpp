#pragma once

// File formats: the self-describing certificate text format (version 1), the
// iteration trace CSV, and JSON run configurations.  All numeric output goes
// through format_double, so identical inputs serialize byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "roa/bench.hpp"
#include "roa/kernels.hpp"
#include "roa/verify.hpp"
#include "roa/vsiter.hpp"

namespace roa::io {

// Everything a certificate consumer needs without the original config: the
// dynamics, the verification box and integration parameters, the margins the
// constraints were built with, and the certificate itself.
struct CertificateFile {
  DynamicalSystem system;
  Box box;
  kernels::SimParams sim;
  Polynomial l1, l2;
  Certificate certificate;

  explicit CertificateFile(int nvars) : l1(nvars), l2(nvars), certificate(nvars) {}
};

void write_certificate(const std::string& path, const CertificateFile& file);
CertificateFile read_certificate(const std::string& path);

// One row per iteration; per-shape levels live in a single semicolon-joined
// field so rounds with different shape counts share the schema.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

// A fully resolved run recipe: preset fields plus reproducibility knobs.
struct RunConfig {
  bench::BenchmarkPreset recipe;
  std::uint64_t seed = 0;
  std::string out_dir = "runs/out";

  explicit RunConfig(bench::BenchmarkPreset r) : recipe(std::move(r)) {}
};

// JSON schema: {"system": name-or-object, "rounds": [...], "box": {...},
// "sim": {...}, degree/tolerance overrides, "seed", "out"}.  A preset name
// fills every field the file does not override.
RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config(const std::string& path);
std::string emit_run_config(const RunConfig& cfg);
RunConfig preset_run_config(const std::string& name);

}  // namespace roa::io
