// Copyright 2026 The fmlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <iostream>

#include "fmlab/harness/commands.hpp"
#include "fmlab/simd/kernels.hpp"

int main(int argc, char** argv) {
  using fmlab::harness::CommandOptions;
  CLI::App app{"Flow-matching sample-complexity laboratory"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel set: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"train", "Train a velocity network with one-sample SGD"},
      {"sample", "Generate samples from a checkpoint"},
      {"sweep", "Run the W2-versus-n scaling sweep"},
      {"decompose", "Measure the error decomposition over an n-grid"},
      {"bounds", "Print the closed-form bounds for a set of inputs"},
      {"verify", "Run the property suite"},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    const std::string name = e.name;
    if (name != "verify") sub->add_option("--config", opts.config, "JSON configuration file")->required();
    if (name != "bounds") sub->add_option("--seed", seed, "Override the configured seed");
    if (name != "bounds" && name != "verify") sub->add_option("--out", out, "Override the output directory");
    if (name == "verify") sub->add_option("--fault", opts.fault, "Inject a fault: flip-gradient-sign, euler-for-rk4");
    if (name == "bounds") sub->add_option("--format", opts.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fmlab::harness::kExitConfig;
  }

  if (isa == "scalar") fmlab::simd::set_active(fmlab::simd::Isa::kScalar);
  if (isa == "avx2") {
    if (!fmlab::simd::avx2_kernels()) {
      std::cerr << "configuration error: --isa: vector kernels are not available on this machine\n";
      return fmlab::harness::kExitConfig;
    }
    fmlab::simd::set_active(fmlab::simd::Isa::kAvx2);
  }

  CLI::App* chosen = app.get_subcommands().front();
  auto given = [&](const char* flag) {
    const CLI::Option* o = chosen->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  if (given("--seed")) opts.seed = seed;
  if (given("--out")) opts.out = out;
  return fmlab::harness::run_command(chosen->get_name(), opts, std::cout, std::cerr);
}
