#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "padicdm/padicdm.hpp"

namespace {

std::string ledger_csv(const padicdm::Json& report) {
  std::ostringstream os;
  os << "name,pass,worst\n";
  for (const auto& c : report["checks"]) {
    os << c["name"].get<std::string>() << "," << (c["pass"].get<bool>() ? "true" : "false") << ","
       << (c["worst"].is_null() ? "" : c["worst"].get<std::string>()) << "\n";
  }
  for (const auto& e : report["errors"])
    os << "error:" << e["stage"].get<std::string>() << ",false," << e["code"].get<std::string>() << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic direct images of differential modules along finite etale disc maps"};
  std::string spec_path, example, out_path, format = "json", polygon;
  std::optional<int> N, R, trials;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  auto* spec_opt = app.add_option("--spec", spec_path, "JSON job file")->check(CLI::ExistingFile);
  auto* ex_opt = app.add_option("--example", example, "canned example: p2-trivial, p2-exp, p3-trivial");
  spec_opt->excludes(ex_opt);
  app.add_option("--series-order", N, "truncation order N (>= 8)");
  app.add_option("--digits", R, "p-adic digit cap R (>= 8)");
  app.add_option("--seed", seed, "seed for the optimality check");
  app.add_option("--trials", trials, "combinations per radius class");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--polygon", polygon, "emit the valuation polygon of: f, shift:I, u:I, V:I,K, system:I,K, basis:C,K");
  app.add_flag("--timing", timing, "print wall time to stderr");
  CLI11_PARSE(app, argc, argv);

  if (spec_path.empty() && example.empty()) {
    std::cerr << "one of --spec or --example is required\n";
    return 2;
  }
  padicdm::JobOverrides ov{N, R, seed, trials};
  auto start = std::chrono::steady_clock::now();
  std::string text;
  bool pass = false;
  try {
    padicdm::JobReport report;
    std::optional<padicdm::DiffTable> diffs;
    if (!example.empty()) {
      padicdm::ExampleRun ex = padicdm::run_example(example, ov);
      report = std::move(ex.report);
      diffs = std::move(ex.diffs);
      pass = ex.pass;
    } else {
      std::ifstream in(spec_path);
      padicdm::Json j;
      try {
        j = padicdm::Json::parse(in);
      } catch (const padicdm::Json::exception& e) {
        throw padicdm::Error(padicdm::Errc::SchemaError, std::string("malformed JSON: ") + e.what());
      }
      report = padicdm::run(padicdm::job_from_json(j, ov));
      pass = report.pass;
    }
    if (!polygon.empty()) {
      padicdm::PolygonData pd = padicdm::emit_polygon(report, polygon);
      text = format == "csv" ? padicdm::to_csv(pd) : padicdm::to_json(pd).dump(2) + "\n";
    } else if (format == "csv") {
      text = ledger_csv(report.json);
      if (diffs) text += "\n" + diffs->to_csv();
    } else {
      text = report.json.dump(2) + "\n";
    }
  } catch (const padicdm::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const padicdm::Json::exception& e) {
    std::cerr << "SchemaError: " << e.what() << "\n";
    return 2;
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  if (timing) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cerr << "wall time: " << ms.count() << " ms\n";
  }
  return pass ? 0 : 1;
}
