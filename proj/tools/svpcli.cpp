// svpcli: command-line driver for constructing spherical Voronoi partitions,
// solving Moebius-flatness certificates, building conformally flattening
// potentials, running the verification checks, measuring discrete stability
// margins, estimating cell volumes, and rendering n = 2 partitions.
//
// Exit codes: 0 = success / all checks pass, 1 = error (bad input, schema
// violation, unsupported request), 2 = checked and failed / infeasible.
//
// All emitted files are byte-deterministic for identical (inputs, seed):
// numbers are formatted with "%.17g", keys in fixed order, LF line endings.
// Randomized commands use the seeded splitmix64 generator from svp/rng.hpp
// and echo the seed into their reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "svp/discrete.hpp"
#include "svp/verification.hpp"

using namespace svp;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- formatting

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string vec_json(const Vec& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num(v[i]);
  }
  return s + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

// ------------------------------------------------------------------- parsing

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open input file: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

SpaceKind kind_of(const std::string& letter) {
  if (letter == "S") return SpaceKind::SphereS;
  if (letter == "R") return SpaceKind::EuclidR;
  if (letter == "H") return SpaceKind::HyperH;
  if (letter == "G") return SpaceKind::GaussG;
  throw std::runtime_error("space kind must be one of S|R|H|G, got: " + letter);
}

Vec parse_vec(const json& j, const std::string& field) {
  if (!j.is_array()) throw std::runtime_error("field '" + field + "' must be a number array");
  Vec v;
  for (const auto& x : j) {
    if (!x.is_number()) throw std::runtime_error("field '" + field + "' must be a number array");
    v.push_back(x.get<double>());
  }
  return v;
}

Space parse_space(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("n"))
    throw std::runtime_error("space must be an object {\"kind\":\"S|R|H|G\",\"n\":int}");
  return make_space(kind_of(j.at("kind").get<std::string>()), j.at("n").get<int>());
}

PartitionSpec parse_partition(const json& j) {
  if (!j.is_object() || !j.contains("space") || !j.contains("cells"))
    throw std::runtime_error("partition must be an object {\"space\":{...},\"cells\":[...]}");
  Space space = parse_space(j.at("space"));
  std::vector<CellParams> cells;
  for (const auto& cj : j.at("cells")) {
    CellParams cell;
    cell.c = parse_vec(cj.at("c"), "cells[].c");
    cell.k = cj.at("k").get<double>();
    if (cj.contains("kS")) cell.kS_aux = cj.at("kS").get<double>();
    cells.push_back(std::move(cell));
  }
  return make_partition(space, std::move(cells));
}

std::string space_json(const Space& space) {
  return std::string("{\"kind\":\"") + space.letter() + "\",\"n\":" + std::to_string(space.n) + "}";
}

std::string partition_json(const PartitionSpec& part) {
  std::string s = "{\"space\":" + space_json(part.space) + ",\"cells\":[";
  for (int i = 0; i < part.q(); ++i) {
    const CellParams& cell = part.cells[i];
    if (i) s += ",";
    s += "{\"c\":" + vec_json(cell.c) + ",\"k\":" + num(cell.k);
    if (cell.kS_aux) s += ",\"kS\":" + num(*cell.kS_aux);
    s += "}";
  }
  return s + "]}\n";
}

MobiusMap parse_mobius(const json& j) {
  if (!j.is_object() || !j.contains("moves"))
    throw std::runtime_error("mobius map must be an object {\"moves\":[...]}");
  MobiusMap map;
  for (const auto& mj : j.at("moves")) {
    if (mj.contains("rotate")) {
      Mat rot;
      for (const auto& row : mj.at("rotate")) rot.push_back(parse_vec(row, "rotate row"));
      map.moves.push_back(make_rotate(std::move(rot)));
    } else if (mj.contains("stereoAffine")) {
      const auto& aj = mj.at("stereoAffine");
      map.moves.push_back(make_stereo_affine(parse_vec(aj.at("t"), "stereoAffine.t"),
                                             aj.at("s").get<double>()));
    } else {
      throw std::runtime_error("mobius move must contain 'rotate' or 'stereoAffine'");
    }
  }
  return map;
}

std::string certificate_json(const FlatnessCertificate& cert) {
  return "{\"xi\":" + vec_json(cert.xi) + ",\"residual\":" + num(cert.residual) +
         ",\"feasible\":" + (cert.feasible ? "true" : "false") +
         ",\"dim\":" + std::to_string(cert.solution_space_dim) + "}\n";
}

FlatnessCertificate parse_certificate(const json& j) {
  FlatnessCertificate cert;
  cert.xi = parse_vec(j.at("xi"), "xi");
  cert.residual = j.at("residual").get<double>();
  cert.feasible = j.at("feasible").get<bool>();
  cert.solution_space_dim = j.at("dim").get<int>();
  return cert;
}

const char* form_name(PotentialSpec::Form form) {
  switch (form) {
    case PotentialSpec::Form::SphereAffine: return "sphereAffine";
    case PotentialSpec::Form::EuclidQuadratic: return "euclidQuadratic";
    case PotentialSpec::Form::MinkowskiAffine: return "minkowskiAffine";
    default: return "gaussianConst";
  }
}

std::string potential_json(const PotentialSpec& v) {
  return "{\"space\":" + space_json(v.space) + ",\"form\":\"" + form_name(v.form) +
         "\",\"xi\":" + vec_json(v.xi) + ",\"theta\":" + vec_json(v.theta) +
         ",\"eta\":" + num(v.eta) + "}\n";
}

PotentialSpec parse_potential(const json& j) {
  PotentialSpec v;
  v.space = parse_space(j.at("space"));
  std::string form = j.at("form").get<std::string>();
  if (form == "sphereAffine") v.form = PotentialSpec::Form::SphereAffine;
  else if (form == "euclidQuadratic") v.form = PotentialSpec::Form::EuclidQuadratic;
  else if (form == "minkowskiAffine") v.form = PotentialSpec::Form::MinkowskiAffine;
  else if (form == "gaussianConst") v.form = PotentialSpec::Form::GaussianConst;
  else throw std::runtime_error("unknown potential form: " + form);
  v.xi = parse_vec(j.at("xi"), "xi");
  v.theta = parse_vec(j.at("theta"), "theta");
  v.eta = j.at("eta").get<double>();
  return v;
}

std::string report_json(const VerificationReport& rep) {
  return "{\"check\":" + quote(rep.check) + ",\"max\":" + num(rep.max) +
         ",\"mean\":" + num(rep.mean) + ",\"samples\":" + std::to_string(rep.samples) +
         ",\"tol\":" + num(rep.tol) + ",\"pass\":" + (rep.pass ? "true" : "false") + "}";
}

// Builds the potential for a partition: explicit file if given, otherwise the
// closed-form potential of the minimum-norm flatness certificate (V = 1 on G).
PotentialSpec potential_for(const PartitionSpec& part, const std::string& potential_path,
                            int sampler_count, uint64_t seed) {
  if (!potential_path.empty()) return parse_potential(read_json(potential_path));
  FlatnessCertificate cert;
  if (part.space.kind != SpaceKind::GaussG) {
    cert = solve_flatness(part, sampler_count, seed);
    if (!cert.feasible)
      throw std::runtime_error(
          "partition is not Moebius-flat (residual " + num(cert.residual) +
          "); no conformally flattening potential exists along this route");
  }
  return build_potential(part.space, cert);
}

// --------------------------------------------------------------- subcommands

int cmd_construct(const std::string& space_letter, int n, int q, const std::string& mobius_path,
                  const std::string& out) {
  SpaceKind kind = kind_of(space_letter);
  PartitionSpec part = [&] {
    if (kind == SpaceKind::GaussG) {
      if (!mobius_path.empty())
        throw std::runtime_error("Moebius transport is undefined on G^n");
      // flat equidistant q-partition of G^n with |c_ij| = 1, k = 0
      std::vector<CellParams> cells;
      double r = std::sqrt((q - 1.0) / (2.0 * q));
      for (const Vec& p : equidistant_points(q, n - 1))
        cells.push_back({scale(p, r), 0.0, std::nullopt});
      return make_partition(make_space(kind, n), std::move(cells));
    }
    PartitionSpec part_S = standard_flat_partition(n, q);
    if (!mobius_path.empty()) part_S = mobius_apply(parse_mobius(read_json(mobius_path)), part_S);
    if (kind == SpaceKind::SphereS) return part_S;
    PullbackResult pulled = pullback_partition(part_S, kind);
    if (pulled.part.q() < 2)
      throw std::runtime_error("pullback retains fewer than two cells");
    return pulled.part;
  }();
  double max_residual = 0.0;
  for (int i = 0; i < part.q(); ++i)
    for (int j = i + 1; j < part.q(); ++j)
      if (interface_nonempty(part, i, j))
        max_residual = std::max(max_residual, interface_sphere(part, i, j).consistency_residual());
  std::cerr << "{\"note\":\"max_consistency_residual\",\"value\":" << num(max_residual) << "}\n";
  write_text(out, partition_json(part));
  return 0;
}

int cmd_flatness(const std::string& part_path, int sampler_count, uint64_t seed,
                 const std::string& out) {
  PartitionSpec part = parse_partition(read_json(part_path));
  FlatnessCertificate cert = solve_flatness(part, sampler_count, seed);
  write_text(out, certificate_json(cert));
  return cert.feasible ? 0 : 2;
}

int cmd_potential(const std::string& part_path, const std::string& cert_path,
                  const std::string& out) {
  PartitionSpec part = parse_partition(read_json(part_path));
  FlatnessCertificate cert;
  if (!cert_path.empty()) cert = parse_certificate(read_json(cert_path));
  else if (part.space.kind != SpaceKind::GaussG)
    throw std::runtime_error("--certificate is required except on G^n");
  if (part.space.kind != SpaceKind::GaussG && !cert.feasible) {
    write_text(out, "{\"error\":\"infeasible certificate\"}\n");
    return 2;
  }
  write_text(out, potential_json(build_potential(part.space, cert)));
  return 0;
}

int cmd_verify(const std::string& part_path, const std::string& potential_path, int samples,
               uint64_t seed, const std::string& out) {
  PartitionSpec part = parse_partition(read_json(part_path));
  CheckSpec spec;
  spec.samples = samples;
  spec.seed = seed;

  std::vector<VerificationReport> reports;
  reports.push_back(check_stationarity(part, spec));
  // Triple-point checks apply only when the partition actually has junctions.
  auto try_triple_check = [&](auto&& check) {
    try {
      reports.push_back(check());
    } catch (const std::exception& e) {
      std::string m = e.what();
      if (m.find("no triple points") == std::string::npos &&
          m.find("empty junction") == std::string::npos)
        throw;
    }
  };
  if (part.q() >= 3) try_triple_check([&] { return check_three_tensor(part, spec); });

  if (!potential_path.empty() || part.space.kind == SpaceKind::GaussG ||
      solve_flatness(part).feasible) {
    PotentialSpec v = potential_for(part, potential_path, 4096, seed);
    if (part.q() >= 3) try_triple_check([&] { return check_conformal_bc(part, v, spec); });
    reports.push_back(check_LJac_potential(part, v, spec));
    if (part.space.n >= 3 && part.space.kind != SpaceKind::GaussG)
      reports.push_back(check_RicV(part, v, spec));
  }

  bool pass = true;
  std::string s = "{\"seed\":" + std::to_string(seed) + ",\"reports\":[";
  for (size_t i = 0; i < reports.size(); ++i) {
    if (i) s += ",";
    s += report_json(reports[i]);
    pass = pass && reports[i].pass;
  }
  s += "],\"pass\":";
  s += pass ? "true" : "false";
  s += "}\n";
  write_text(out, s);
  return pass ? 0 : 2;
}

int cmd_stability(const std::string& part_path, const std::string& potential_path,
                  double resolution, double truncation, const std::string& mode_name,
                  uint64_t seed, const std::string& out) {
  PartitionSpec part = parse_partition(read_json(part_path));
  if (part.space.n != 2)
    throw std::runtime_error("stability: only n = 2 interface complexes are supported");
  StabilityMode mode;
  if (mode_name == "image") mode = StabilityMode::ImageOfLV;
  else if (mode_name == "kernel") mode = StabilityMode::VolumeKernel;
  else throw std::runtime_error("stability mode must be image|kernel");

  PotentialSpec v = potential_for(part, potential_path, 4096, seed);
  PartitionComplex cx = build_complex_1d(part, resolution, truncation);
  OperatorSet ops = assemble_operators(cx, v);
  double margin = stability_margin(cx, ops, mode);
  const double tol = 1e-4;
  bool pass = margin >= -tol;
  std::string s = "{\"check\":\"stability_" + mode_name + "\",\"seed\":" + std::to_string(seed) +
                  ",\"margin\":" + num(margin) + ",\"resolution\":" + num(resolution) +
                  ",\"dofs\":" + std::to_string(cx.dofs()) +
                  ",\"meshes\":" + std::to_string(cx.meshes.size()) +
                  ",\"junctions\":" + std::to_string(cx.junctions.size()) +
                  ",\"tol\":" + num(tol) + ",\"pass\":" + (pass ? "true" : "false") + "}\n";
  write_text(out, s);
  return pass ? 0 : 2;
}

int cmd_volumes(const std::string& part_path, int samples, uint64_t seed, const std::string& out,
                const std::string& csv_path) {
  PartitionSpec part = parse_partition(read_json(part_path));
  VolumeEstimates est = estimate_volumes(part, samples, seed);
  std::string s = "{\"seed\":" + std::to_string(seed) +
                  ",\"samples\":" + std::to_string(est.samples_used) +
                  ",\"truncation\":" + num(est.truncation_radius) + ",\"cells\":[";
  for (size_t i = 0; i < est.measure.size(); ++i) {
    if (i) s += ",";
    s += "{\"measure\":" + num(est.measure[i]) + ",\"stdError\":" + num(est.std_error[i]) +
         ",\"unbounded\":" + (est.unbounded[i] ? "true" : "false") + "}";
  }
  s += "]}\n";
  write_text(out, s);
  if (!csv_path.empty()) {
    std::string csv = "cell,measure,std_error,unbounded\n";
    for (size_t i = 0; i < est.measure.size(); ++i)
      csv += std::to_string(i) + "," + num(est.measure[i]) + "," + num(est.std_error[i]) + "," +
             (est.unbounded[i] ? "1" : "0") + "\n";
    write_text(csv_path, csv);
  }
  return 0;
}

// Projects an ambient point of an n = 2 model to drawing coordinates:
// identity on R^2/G^2, stereographic for S^2, hemisphere + stereographic for H^2.
Vec render_project(const Space& space, const Vec& p) {
  switch (space.kind) {
    case SpaceKind::SphereS: return stereo_R_inv(p);
    case SpaceKind::HyperH: return stereo_R_inv(stereo_H(p));
    default: return p;
  }
}

int cmd_render(const std::string& part_path, double resolution, double truncation,
               const std::string& out, const std::string& csv_path) {
  PartitionSpec part = parse_partition(read_json(part_path));
  if (part.space.n != 2) throw std::runtime_error("render: unsupported dimension (n must be 2)");
  PartitionComplex cx = build_complex_1d(part, resolution, truncation);
  if (cx.meshes.empty()) throw std::runtime_error("render: no interfaces to draw");

  std::vector<std::vector<Vec>> lines;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const InterfaceMesh1D& mesh : cx.meshes) {
    std::vector<Vec> line;
    for (const Vec& p : mesh.points) {
      Vec w = render_project(part.space, p);
      xmin = std::min(xmin, w[0]);
      xmax = std::max(xmax, w[0]);
      ymin = std::min(ymin, w[1]);
      ymax = std::max(ymax, w[1]);
      line.push_back(std::move(w));
    }
    if (mesh.closed) line.push_back(line.front());
    lines.push_back(std::move(line));
  }

  const double size = 800.0;
  double span = std::max(std::max(xmax - xmin, ymax - ymin), 1e-9);
  double margin = 0.05 * span;
  double scale_px = size / (span + 2 * margin);
  auto px = [&](double x) { return (x - xmin + margin) * scale_px; };
  auto py = [&](double y) { return size - (y - ymin + margin) * scale_px; }; // y up

  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" "
      "viewBox=\"0 0 800 800\">\n"
      "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  for (const auto& line : lines) {
    svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (size_t v = 0; v < line.size(); ++v) {
      if (v) svg += " ";
      svg += num(px(line[v][0])) + "," + num(py(line[v][1]));
    }
    svg += "\"/>\n";
  }
  for (const Junction& junction : cx.junctions) {
    Vec w = render_project(part.space, junction.p);
    svg += "<circle cx=\"" + num(px(w[0])) + "\" cy=\"" + num(py(w[1])) +
           "\" r=\"3\" fill=\"black\"/>\n";
  }
  svg += "</svg>\n";
  write_text(out, svg);

  if (!csv_path.empty()) {
    std::string csv = "mesh,cell_i,cell_j,x0,x1\n";
    for (size_t m = 0; m < cx.meshes.size(); ++m) {
      const InterfaceMesh1D& mesh = cx.meshes[m];
      for (const Vec& p : mesh.points) {
        Vec w = render_project(part.space, p);
        csv += std::to_string(m) + "," + std::to_string(mesh.i) + "," + std::to_string(mesh.j) +
               "," + num(w[0]) + "," + num(w[1]) + "\n";
      }
    }
    write_text(csv_path, csv);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical Voronoi partition toolkit"};
  app.require_subcommand(1);

  std::string space_letter = "S", mobius_path, part_path, cert_path, potential_path;
  std::string out = "-", csv_path, mode_name = "image";
  int n = 3, q = 4, samples = 64, volume_samples = 100000, sampler_count = 4096;
  double resolution = 25.0, truncation = 8.0;
  uint64_t seed = 2026;

  auto* construct = app.add_subcommand("construct", "build a standard flat partition");
  construct->add_option("--space", space_letter, "model space S|R|H|G")->required();
  construct->add_option("--n", n, "manifold dimension")->required();
  construct->add_option("--q", q, "cell count")->required();
  construct->add_option("--mobius", mobius_path, "Moebius map JSON file");
  construct->add_option("--out", out, "output partition JSON path (default stdout)");

  auto* flatness = app.add_subcommand("flatness", "solve the Moebius-flatness certificate");
  flatness->add_option("--partition", part_path, "partition JSON file")->required();
  flatness->add_option("--sampler-count", sampler_count, "interface emptiness samples");
  flatness->add_option("--seed", seed, "RNG seed");
  flatness->add_option("--out", out, "output certificate JSON path");

  auto* potential = app.add_subcommand("potential", "build the flattening potential");
  potential->add_option("--partition", part_path, "partition JSON file")->required();
  potential->add_option("--certificate", cert_path, "certificate JSON file");
  potential->add_option("--out", out, "output potential JSON path");

  auto* verify = app.add_subcommand("verify", "run the geometric identity checks");
  verify->add_option("--partition", part_path, "partition JSON file")->required();
  verify->add_option("--potential", potential_path, "potential JSON file (default: from certificate)");
  verify->add_option("--samples", samples, "sample count per check");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--out", out, "output report JSON path");

  auto* stability = app.add_subcommand("stability", "discrete stability margin (n = 2)");
  stability->add_option("--partition", part_path, "partition JSON file")->required();
  stability->add_option("--potential", potential_path, "potential JSON file (default: from certificate)");
  stability->add_option("--resolution", resolution, "vertices per unit interface length");
  stability->add_option("--truncation", truncation, "truncation radius for unbounded interfaces");
  stability->add_option("--mode", mode_name, "image|kernel");
  stability->add_option("--seed", seed, "seed echoed into the report");
  stability->add_option("--out", out, "output report JSON path");

  auto* volumes = app.add_subcommand("volumes", "Monte Carlo cell measures");
  volumes->add_option("--partition", part_path, "partition JSON file")->required();
  volumes->add_option("--samples", volume_samples, "Monte Carlo samples");
  volumes->add_option("--seed", seed, "RNG seed");
  volumes->add_option("--out", out, "output JSON path");
  volumes->add_option("--csv", csv_path, "optional CSV output path");

  auto* render = app.add_subcommand("render", "SVG figure of an n = 2 partition");
  render->add_option("--partition", part_path, "partition JSON file")->required();
  render->add_option("--resolution", resolution, "vertices per unit interface length");
  render->add_option("--truncation", truncation, "truncation radius for unbounded interfaces");
  render->add_option("--out", out, "output SVG path");
  render->add_option("--csv", csv_path, "optional CSV of sampled interface points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (construct->parsed()) return cmd_construct(space_letter, n, q, mobius_path, out);
    if (flatness->parsed()) return cmd_flatness(part_path, sampler_count, seed, out);
    if (potential->parsed()) return cmd_potential(part_path, cert_path, out);
    if (verify->parsed()) return cmd_verify(part_path, potential_path, samples, seed, out);
    if (stability->parsed())
      return cmd_stability(part_path, potential_path, resolution, truncation, mode_name, seed, out);
    if (volumes->parsed()) return cmd_volumes(part_path, volume_samples, seed, out, csv_path);
    if (render->parsed()) return cmd_render(part_path, resolution, truncation, out, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":" << quote(e.what()) << "}\n";
    return 1;
  }
  return 1;
}
