#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multizero/macaulay.hpp"
#include "multizero/report.hpp"

namespace {

using namespace multizero;

// Parses one complex literal: "1.5", "-2e-3", "0.5i", "1-2i", "i", "-i".
Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty coordinate");

  auto to_double = [](const std::string& text) {
    if (text.empty() || text == "+") return 1.0;
    if (text == "-") return -1.0;
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size())
      throw std::invalid_argument("bad numeric literal '" + text + "'");
    return v;
  };

  if (s.back() != 'i' && s.back() != 'I') return Complex(to_double(s), 0.0);

  std::string body = s.substr(0, s.size() - 1);
  // split before the sign of the imaginary part, skipping exponent signs
  for (size_t pos = body.size(); pos-- > 1;) {
    if ((body[pos] == '+' || body[pos] == '-') &&
        body[pos - 1] != 'e' && body[pos - 1] != 'E') {
      return Complex(to_double(body.substr(0, pos)), to_double(body.substr(pos)));
    }
  }
  return Complex(0.0, to_double(body));
}

Point parse_point(const std::string& csv) {
  Point p;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) p.push_back(parse_complex(item));
  if (p.empty()) throw std::invalid_argument("--at needs at least one coordinate");
  return p;
}

Point load_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open point file");
  Point p;
  std::string line;
  while (std::getline(in, line)) {
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    p.push_back(parse_complex(line));
  }
  if (p.empty()) throw std::runtime_error(path + ": no coordinates found");
  return p;
}

struct Options {
  std::string file;
  std::string at;
  std::string at_file;
  std::string output;
  std::string format = "text";
  std::string dump_dir;
  double theta = 1e-8;
  double theta_j = 1e-6;
  double tol = 1e-12;
  double cluster_tol = 1e-10;
  double radius = 0.01;
  int max_order = 50;
  int stage_cap = 8;
  int b1_cap = 64;
  int n_starts = 200;
  int jet_order = 2;
  std::uint64_t seed = kDefaultSeed;
};

Point resolve_point(const Options& opt, const System& sys, const char* what) {
  Point p;
  if (!opt.at_file.empty())
    p = load_point(opt.at_file);
  else if (!opt.at.empty())
    p = parse_point(opt.at);
  else
    throw std::runtime_error(std::string("missing ") + what + ": use --at or --at-file");
  if (static_cast<int>(p.size()) != sys.num_vars())
    throw std::runtime_error(opt.file + " has " + std::to_string(sys.num_vars()) +
                             " variables but the point has " + std::to_string(p.size()) +
                             " coordinates");
  return p;
}

void emit(const Options& opt, const std::string& report) {
  if (opt.output.empty()) {
    std::cout << report;
    return;
  }
  std::ofstream out(opt.output, std::ios::binary);
  if (!out) throw std::runtime_error(opt.output + ": cannot open for writing");
  out << report;
}

void dump_macaulay(const Options& opt, const System& sys, const Point& at,
                   int up_to) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.dump_dir);
  auto tables = system_tables(sys, at, up_to);
  for (int alpha = 0; alpha <= up_to; ++alpha) {
    MacaulayMatrix mm = build_macaulay(sys, at, alpha, tables);
    fs::path path = fs::path(opt.dump_dir) / ("macaulay_" + std::to_string(alpha) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    write_macaulay_csv(mm, sys.variables, at, out);
  }
}

int cmd_multiplicity(const Options& opt) {
  System sys = load_system(opt.file);
  Point at = resolve_point(opt, sys, "zero");
  MultiplicityStructure ms =
      multiplicity_structure(sys, at, opt.theta, opt.max_order, opt.seed);
  if (!opt.dump_dir.empty())
    dump_macaulay(opt, sys, at, ms.terminated ? ms.depth + 1 : opt.max_order);
  emit(opt, opt.format == "json" ? structure_json(ms) : structure_text(ms));
  return ms.terminated ? 0 : 2;
}

int cmd_deflate(const Options& opt) {
  System sys = load_system(opt.file);
  Point at = resolve_point(opt, sys, "start point");
  DeflationChain chain =
      depth_deflate(sys, at, opt.theta_j, opt.tol, opt.seed, opt.stage_cap);
  emit(opt, opt.format == "json" ? deflation_json(chain, opt.theta_j, opt.tol)
                                 : deflation_text(chain));
  return 0;
}

int cmd_breadth1(const Options& opt) {
  System sys = load_system(opt.file);
  Point at = resolve_point(opt, sys, "zero");
  BreadthOneResult r =
      breadth_one_multiplicity(sys, at, opt.theta, opt.tol, opt.seed, opt.b1_cap);
  emit(opt, opt.format == "json" ? breadth_one_json(r, opt.theta, opt.tol)
                                 : breadth_one_text(r));
  return 0;
}

int cmd_cluster(const Options& opt) {
  System sys = load_system(opt.file);
  Point center = resolve_point(opt, sys, "center");
  std::vector<ClusterZero> zeros = cluster_search(sys, center, opt.radius,
                                                  opt.n_starts, opt.cluster_tol,
                                                  opt.seed);
  emit(opt, opt.format == "json"
                ? cluster_json(zeros, center, opt.radius, opt.n_starts,
                               opt.cluster_tol, opt.seed)
                : cluster_text(zeros));
  return 0;
}

int cmd_jet(const Options& opt) {
  System sys = load_system(opt.file);
  Point at = resolve_point(opt, sys, "expansion point");
  System truncated = jet_truncate(sys, at, opt.jet_order);
  emit(opt, render(truncated));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiplicity structure and refinement of multiple zeros"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, const char* point_help) {
    cmd->add_option("file", opt.file, "system file")->required();
    cmd->add_option("--at", opt.at, point_help);
    cmd->add_option("--at-file", opt.at_file, "file with one a+bi coordinate per line");
    cmd->add_option("--seed", opt.seed, "PRNG seed");
    cmd->add_option("--output", opt.output, "write the report here instead of stdout");
    cmd->add_option("--format", opt.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* mult = app.add_subcommand("multiplicity", "multiplicity structure at a zero");
  add_common(mult, "the zero, comma-separated a+bi coordinates");
  mult->add_option("--theta", opt.theta, "rank threshold");
  mult->add_option("--max-order", opt.max_order, "Hilbert function order cap");
  mult->add_option("--dump-macaulay", opt.dump_dir, "directory for matrix CSV dumps");

  CLI::App* defl = app.add_subcommand("deflate", "refine a multiple zero by depth-deflation");
  add_common(defl, "the start point near the zero");
  defl->add_option("--theta-j", opt.theta_j, "Jacobian rank threshold");
  defl->add_option("--tol", opt.tol, "Gauss-Newton step tolerance");
  defl->add_option("--stage-cap", opt.stage_cap, "maximum deflation stages");

  CLI::App* b1 = app.add_subcommand("breadth1", "breadth-one multiplicity structure");
  add_common(b1, "the zero, comma-separated a+bi coordinates");
  b1->add_option("--theta", opt.theta, "rank threshold for the nullity-1 check");
  b1->add_option("--tol", opt.tol, "bordered-solve residual tolerance");
  b1->add_option("--stage-cap", opt.b1_cap, "maximum chain length");

  CLI::App* clus = app.add_subcommand("cluster", "sweep a polydisc for zeros");
  add_common(clus, "the polydisc center");
  clus->add_option("--radius", opt.radius, "polydisc radius")->required();
  clus->add_option("--n-starts", opt.n_starts, "number of random starts");
  clus->add_option("--tol", opt.cluster_tol, "Gauss-Newton step tolerance");

  CLI::App* jet = app.add_subcommand("jet", "truncate the system to a Taylor jet");
  add_common(jet, "the expansion point");
  jet->add_option("--order", opt.jet_order, "truncation order")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 assigns distinct exit codes per error class; the contract here is
    // simply 0 for --help/--version and 1 for anything malformed.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (mult->parsed()) return cmd_multiplicity(opt);
    if (defl->parsed()) return cmd_deflate(opt);
    if (b1->parsed()) return cmd_breadth1(opt);
    if (clus->parsed()) return cmd_cluster(opt);
    if (jet->parsed()) return cmd_jet(opt);
  } catch (const ParseError& e) {
    std::cerr << opt.file << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
