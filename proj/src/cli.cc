// Copyright 2026 The GETF Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "getf/cli.h"

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "getf/bench.h"
#include "getf/error.h"
#include "getf/getf.h"
#include "getf/ingest.h"
#include "getf/io.h"
#include "getf/synth.h"
#include "getf/tensor_ops.h"

namespace getf {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void add_engine_options(CLI::App* cmd, GetfConfig& cfg, bool& no_consensus) {
  cmd->add_option("--t", cfg.t, "fold threshold in (0, 1]");
  cmd->add_option("--tau", cfg.tau, "minimum relative gain per pattern");
  cmd->add_flag("--exha", cfg.exha, "try all k! folding directions");
  cmd->add_option("--max-rank", cfg.max_rank, "0 = min(20, sum of modes)");
  cmd->add_option("--lambda", cfg.lambda, "minimum pattern size");
  cmd->add_option("--threads", cfg.threads, "0 = GETF_THREADS or all cores");
  cmd->add_flag("--no-consensus", no_consensus,
                "keep raw folded patterns without the consensus pass");
  cmd->add_option("--seed", cfg.seed, "random seed");
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"Boolean tensor decomposition by geometric folding", "getf"};
  app.require_subcommand(1);
  std::function<void()> action;

  // generate
  SynthSpec gen_spec;
  std::string gen_out, gen_truth;
  auto* gen = app.add_subcommand("generate", "write a planted tensor");
  gen->add_option("--shape", gen_spec.shape, "mode lengths, e.g. 8,8,8")
      ->required()
      ->delimiter(',');
  gen->add_option("--rank", gen_spec.rank);
  gen->add_option("--density", gen_spec.factor_density);
  gen->add_option("--noise", gen_spec.noise_flip);
  gen->add_option("--seed", gen_spec.seed);
  gen->add_option("--out", gen_out, "COO output file")->required();
  gen->add_option("--truth", gen_truth,
                  "ground-truth factor directory (default <out>.truth)");
  gen->callback([&] {
    action = [&] {
      const PlantedTensor planted = generate_planted(gen_spec);
      save_coo(planted.tensor, gen_out);
      save_factors(planted.truth,
                   gen_truth.empty() ? gen_out + ".truth" : gen_truth);
      out << "entries " << planted.tensor.count() << "\n";
    };
  });

  // decompose
  GetfConfig dec_cfg;
  bool dec_no_consensus = false;
  std::string dec_in, dec_factors, dec_trace;
  auto* dec = app.add_subcommand("decompose", "run the decomposition");
  dec->add_option("--in", dec_in, "COO input file")->required();
  add_engine_options(dec, dec_cfg, dec_no_consensus);
  dec->add_option("--out-factors", dec_factors, "factor directory");
  dec->add_option("--out-trace", dec_trace, "error trace CSV");
  dec->callback([&] {
    action = [&] {
      dec_cfg.consensus_refinement = !dec_no_consensus;
      const BoolTensor x = load_coo(dec_in);
      const DecompositionResult result = getf_decompose(x, dec_cfg);
      if (!dec_factors.empty()) save_factors(result.factors, dec_factors);
      if (!dec_trace.empty()) write_file_atomic(dec_trace, format_trace(result));
      const int64_t error = result.error_trace.empty()
                                ? result.initial_error
                                : result.error_trace.back();
      out << "rank " << result.factors.rank() << "\n"
          << "error " << error << "\n"
          << "converged_reason "
          << converged_reason_name(result.converged_reason) << "\n";
    };
  });

  // evaluate
  std::string ev_tensor, ev_factors, ev_truth;
  auto* ev = app.add_subcommand("evaluate", "score factors against a tensor");
  ev->add_option("--tensor", ev_tensor)->required();
  ev->add_option("--factors", ev_factors)->required();
  ev->add_option("--truth", ev_truth, "planted factor directory");
  ev->callback([&] {
    action = [&] {
      const BoolTensor x = load_coo(ev_tensor);
      const FactorSet factors = load_factors(ev_factors);
      const int64_t error = reconstruction_error(x, factors);
      out << "rank " << factors.rank() << "\n"
          << "error " << error << "\n"
          << "relative_error "
          << fixed(x.count() == 0 ? 0.0
                                  : static_cast<double>(error) /
                                        static_cast<double>(x.count()))
          << "\n";
      if (!ev_truth.empty()) {
        const RecoveryScore score =
            score_recovery(factors, load_factors(ev_truth));
        out << "mean_jaccard " << fixed(score.mean_jaccard) << "\n"
            << "rank_error " << score.rank_error << "\n";
      }
    };
  });

  // oracle
  std::string or_in, or_factors;
  int or_rank = 5;
  auto* orc = app.add_subcommand("oracle", "exhaustive greedy cover");
  orc->add_option("--in", or_in)->required();
  orc->add_option("--max-rank", or_rank);
  orc->add_option("--out-factors", or_factors);
  orc->callback([&] {
    action = [&] {
      const BoolTensor x = load_coo(or_in);
      const FactorSet factors = greedy_oracle_decompose(x, or_rank);
      if (!or_factors.empty()) save_factors(factors, or_factors);
      out << "rank " << factors.rank() << "\n"
          << "error " << reconstruction_error(x, factors) << "\n";
    };
  });

  // bench
  BenchOptions bench_opts;
  bool bench_no_consensus = false;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "scaling study");
  bench->add_option("--orders", bench_opts.orders)->delimiter(',');
  bench->add_option("--sizes", bench_opts.sizes, "mode lengths")
      ->delimiter(',');
  bench->add_option("--repeats", bench_opts.repeats);
  bench->add_option("--rank", bench_opts.rank);
  bench->add_option("--density", bench_opts.density);
  bench->add_option("--noise", bench_opts.noise);
  bench->add_option("--seed", bench_opts.seed);
  bench->add_option("--threads", bench_opts.config.threads);
  bench->add_flag("--no-consensus", bench_no_consensus);
  bench->add_option("--out", bench_out, "CSV output (default stdout)");
  bench->callback([&] {
    action = [&] {
      bench_opts.config.consensus_refinement = !bench_no_consensus;
      const std::string csv = format_bench_csv(run_bench(bench_opts));
      if (bench_out.empty()) {
        out << csv;
      } else {
        write_file_atomic(bench_out, csv);
      }
    };
  });

  // ingest
  std::string in_csv, in_spec, in_out;
  auto* ing = app.add_subcommand("ingest", "build a tensor from CSV records");
  ing->add_option("--csv", in_csv)->required();
  ing->add_option("--spec", in_spec, "JSON mode bindings")->required();
  ing->add_option("--out", in_out, "COO output file")->required();
  ing->callback([&] {
    action = [&] {
      const IngestSpec spec = IngestSpec::from_json(read_file(in_spec));
      const IngestResult result = ingest_csv(in_csv, spec);
      save_coo(result.tensor, in_out);
      nlohmann::ordered_json dict = nlohmann::ordered_json::array();
      for (size_t a = 0; a < spec.modes.size(); ++a) {
        dict.push_back({{"column", spec.modes[a].column},
                        {"values", result.dictionaries[a]}});
      }
      write_file_atomic(in_out + ".dict.json", dict.dump(2) + "\n");
      std::string rejects = "line,reason\n";
      for (const IngestReject& r : result.rejects) {
        nlohmann::json reason = r.reason;
        rejects += std::to_string(r.line) + "," + reason.dump() + "\n";
      }
      write_file_atomic(in_out + ".rejects.csv", rejects);
      out << "records " << result.records << "\n"
          << "rejected " << result.rejects.size() << "\n"
          << "entries " << result.tensor.count() << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "getf: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "getf: " << e.what() << "\n";
    return e.kind() == ErrorKind::kBudget ? kExitBudget : kExitInputError;
  } catch (const std::exception& e) {
    err << "getf: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace getf
