/* Command line front end.  Subcommands:
     run <scenario.json>   one scenario object or an array of them (batch)
     verify                assemble a scenario from flags and run it
     invariants            local genus zero invariants of the total space
     series                hypergeometric series, mirror map, solution

   Exit codes: 0 every suite passed, 1 at least one suite failed, 2 the
   only deviations were scope skips (nonconvex bundle, degenerate ambient
   pairing, dual parameter outside the divisor chart), 64 malformed input.
   The cache directory resolves as --cache-dir, then QSD_CACHE_DIR, then
   .qsd-cache; reports stay byte identical with or without a warm cache. */
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qsd/scenario.hpp"

namespace {

using namespace qsd;

std::string resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QSD_CACHE_DIR")) return env;
  return ".qsd-cache";
}

int worst_exit(const std::vector<Report>& reps) {
  int code = 0;
  for (const Report& rep : reps) {
    int c = report_exit_code(rep);
    if (c == 1) return 1;
    if (c == 2) code = 2;
  }
  return code;
}

void print_reports(const std::vector<Report>& reps, const std::string& format,
                   bool timings, bool batch) {
  if (format == "json") {
    if (batch) {
      Json arr = Json::array();
      for (const Report& rep : reps) arr.push_back(report_to_json(rep, timings));
      std::cout << arr.dump(1) << '\n';
    } else {
      std::cout << report_to_json(reps.front(), timings).dump(1) << '\n';
    }
    return;
  }
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (i) std::cout << '\n';
    std::cout << report_to_text(reps[i], timings);
  }
}

std::string key_suffix(const ZKey& k) {
  std::string out;
  if (k.z) out += " z^" + std::to_string(k.z);
  if (k.lam) out += " lam^" + std::to_string(k.lam);
  if (k.lz) out += " lz^" + std::to_string(k.lz);
  return out;
}

void print_scalar_series(const std::string& label, const ScalarSeries& s) {
  std::cout << label << ":\n";
  for (int d = 0; d <= s.order; ++d)
    for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)])
      std::cout << "  q^" << d << key_suffix(k) << " : " << v.to_text()
                << '\n';
}

void print_class_series(const std::string& label, const ClassSeries& s) {
  std::cout << label << ":\n";
  for (int d = 0; d <= s.order; ++d)
    for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)]) {
      std::cout << "  q^" << d << key_suffix(k) << " : [";
      for (std::size_t i = 0; i < v.c.size(); ++i) {
        if (i) std::cout << ", ";
        std::cout << v.c[i].to_text();
      }
      std::cout << "]\n";
    }
}

void print_matrix(const std::string& label, const SeriesMatrix& m) {
  std::cout << label << ":\n";
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      const ScalarSeries& s = m.at(i, j);
      if (s.is_zero()) continue;
      for (int d = 0; d <= s.order; ++d)
        for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)])
          std::cout << "  [" << i << ',' << j << "] q^" << d << key_suffix(k)
                    << " : " << v.to_text() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qsd;

  CLI::App app{"exact genus zero quantum Serre duality workbench"};
  app.require_subcommand(1);

  std::string cache_dir, format = "text", scenario_file;
  bool timings = false;

  CLI::App* cmd_run = app.add_subcommand(
      "run", "run a scenario file (object or array of objects)");
  cmd_run->add_option("scenario", scenario_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_run->add_option("--cache-dir", cache_dir, "cache directory");
  cmd_run->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_run->add_flag("--timings", timings, "include wall clock seconds");

  std::string space = "P1", twist = "inverse-euler";
  std::vector<int> bundle;
  std::vector<std::string> suites;
  int order = 3, degrees = 3;
  bool use_cache = false;

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "run suites assembled from flags");
  cmd_verify->add_option("--space", space, "projective space P1..P4")
      ->required();
  cmd_verify->add_option("--bundle", bundle, "splitting degrees of the bundle")
      ->required();
  cmd_verify->add_option("--order", order, "q truncation order");
  cmd_verify->add_option("--suite", suites,
                         "suite name or 'all', may repeat");
  cmd_verify->add_flag("--cache", use_cache, "persist theories on disk");
  cmd_verify->add_option("--cache-dir", cache_dir, "cache directory");
  cmd_verify->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_verify->add_flag("--timings", timings, "include wall clock seconds");

  CLI::App* cmd_inv =
      app.add_subcommand("invariants", "local genus zero invariants");
  cmd_inv->add_option("--space", space, "projective space P1..P4")->required();
  cmd_inv->add_option("--bundle", bundle, "splitting degrees of the bundle")
      ->required();
  cmd_inv->add_option("--degrees", degrees, "largest curve degree")
      ->check(CLI::Range(1, kMaxTruncation));
  cmd_inv->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* cmd_series = app.add_subcommand(
      "series", "hypergeometric series, mirror map, and solution");
  cmd_series->add_option("--space", space, "projective space P1..P4")
      ->required();
  cmd_series->add_option("--bundle", bundle, "splitting degrees of the bundle")
      ->required();
  cmd_series->add_option("--twist", twist, "untwisted, euler, inverse-euler")
      ->check(CLI::IsMember({"untwisted", "euler", "inverse-euler"}));
  cmd_series->add_option("--order", order, "q truncation order")
      ->check(CLI::Range(1, kMaxTruncation));
  cmd_series->add_flag("--cache", use_cache, "persist theories on disk");
  cmd_series->add_option("--cache-dir", cache_dir, "cache directory");
  cmd_series->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      std::ifstream in(scenario_file);
      Json doc = Json::parse(in);
      std::vector<Scenario> list;
      bool batch = doc.is_array();
      if (batch)
        for (const Json& j : doc) list.push_back(parse_scenario(j));
      else
        list.push_back(parse_scenario(doc));
      std::vector<Report> reps = run_batch(list, resolve_cache_dir(cache_dir));
      print_reports(reps, format, timings, batch);
      return worst_exit(reps);
    }

    if (cmd_verify->parsed()) {
      Json j;
      j["space"] = space;
      j["bundle"] = bundle;
      j["truncation"] = order;
      j["suites"] = suites.empty() ? std::vector<std::string>{"all"} : suites;
      j["cache"] = use_cache;
      Scenario s = parse_scenario(j);
      Report rep = run_scenario(s, resolve_cache_dir(cache_dir));
      print_reports({rep}, format, timings, false);
      return report_exit_code(rep);
    }

    if (cmd_inv->parsed()) {
      GeometryTriple g(SpaceModel{space_dimension(space)},
                       BundleModel{bundle});
      std::vector<Scalar> inv = local_invariants(g, degrees);
      if (format == "json") {
        Json out;
        out["space"] = space;
        out["bundle"] = bundle;
        Json vals;
        for (std::size_t d = 0; d < inv.size(); ++d)
          vals[std::to_string(d + 1)] = inv[d].to_text();
        out["local_invariants"] = std::move(vals);
        std::cout << out.dump(1) << '\n';
      } else {
        for (std::size_t d = 0; d < inv.size(); ++d)
          std::cout << "d=" << (d + 1) << ": " << inv[d].to_text() << '\n';
      }
      return 0;
    }

    // series
    GeometryTriple g(SpaceModel{space_dimension(space)}, BundleModel{bundle});
    Twist tw = twist == "untwisted"
                   ? Twist::Untwisted
                   : (twist == "euler" ? Twist::Euler : Twist::InverseEuler);
    Theory th = use_cache ? SeriesCache(resolve_cache_dir(cache_dir))
                                .get_or_build(g, tw, order)
                          : build_theory(g, tw, order);
    if (format == "json") {
      Json out;
      out["space"] = space;
      out["bundle"] = bundle;
      out["twist"] = twist;
      out["order"] = order;
      out["i_function"] = class_series_to_json(th.i_raw);
      out["i_normalized"] = class_series_to_json(th.i_norm);
      out["mirror_map"] =
          Json{{"h0", series_to_json(th.tau0)}, {"h2", series_to_json(th.tau2)}};
      out["solution"] = matrix_to_json(th.solution);
      std::cout << out.dump(1) << '\n';
    } else {
      print_class_series("I function", th.i_raw);
      print_class_series("normalized I function", th.i_norm);
      print_scalar_series("mirror map H^0 part", th.tau0);
      print_scalar_series("mirror map H^2 part", th.tau2);
      print_matrix("fundamental solution", th.solution);
    }
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 64;
  } catch (const NonConvex& e) {
    std::cerr << "scope: " << e.what() << '\n';
    return 2;
  } catch (const MirrorMapOutOfRange& e) {
    std::cerr << "scope: " << e.what() << '\n';
    return 2;
  } catch (const AmbientDegenerate& e) {
    std::cerr << "scope: " << e.what() << '\n';
    return 2;
  } catch (const QsdError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 64;
  }
}
