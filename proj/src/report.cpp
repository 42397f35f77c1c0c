#include "hgate/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hgate/error.hpp"

namespace hgate {
namespace {

using nlohmann::json;

json quad_json(const QuadResult& q) {
  return json{{"value", q.value},
              {"error", q.abs_error_estimate},
              {"truncation_T", q.truncation_T},
              {"nodes", q.node_count}};
}

json scalar_json(const CondScalar& c) {
  json j = quad_json(c.quad);
  j["verdict"] = to_string(c.verdict);
  j["status"] = c.status;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json c4_json(const C4Result& c) {
  return json{{"F4_1", scalar_json(c.f1)},
              {"F4_2", scalar_json(c.f2)},
              {"F4_3", scalar_json(c.f3)},
              {"verdict", to_string(c.verdict)},
              {"F4_3_degenerate", c.f3_degenerate}};
}

}  // namespace

std::string condition_report_json(const ConditionReport& rep,
                                  const VariationalFrame& frame,
                                  const std::string& config_json) {
  json j;
  j["system"] = rep.system_name;
  j["beta"] = rep.beta;
  j["thresholds"] = {
      {"zero_threshold", rep.thresholds.zero_threshold},
      {"line_tol", rep.thresholds.line_tol},
      {"plane_tol", rep.thresholds.plane_tol},
      {"kappa_denominator_tol", rep.thresholds.kappa_denominator_tol}};
  j["conditions"] = {
      {"C1", scalar_json(rep.F1)},
      {"C1_prime", scalar_json(rep.F1_prime)},
      {"C2",
       {{"sup", rep.C2.sup},
        {"argmax_t", rep.C2.argmax_t},
        {"verdict", to_string(rep.C2.verdict)}}},
      {"C3", scalar_json(rep.F3)},
      {"C4", c4_json(rep.F4)},
      {"C4_prime", c4_json(rep.F4_prime)},
      {"C5", scalar_json(rep.F5)},
      {"C6",
       {{"holds", rep.C6.holds}}}};
  if (rep.C6.witness) {
    j["conditions"]["C6"]["witness"] = {{"x", rep.C6.witness->x.x},
                                        {"y", rep.C6.witness->x.y},
                                        {"t1", rep.C6.witness->t1},
                                        {"t2", rep.C6.witness->t2},
                                        {"deviation", rep.C6.witness->deviation}};
  }
  j["frame"] = {{"T", frame.T},
                {"omega", frame.omega},
                {"delta0", rep.delta0},
                {"zeta0", {frame.zeta0.x, frame.zeta0.y}},
                {"dichotomy_k", frame.dichotomy_k},
                {"gamma_prime_l2sq", frame.gamma_prime_l2sq},
                {"abel_max_rel_err", frame.diag.abel_max_rel_err},
                {"delta_limit_gap", frame.diag.delta_limit_gap},
                {"delta_min_abs", frame.diag.delta_min_abs}};
  j["kappa_note"] = rep.kappa_note;
  j["config"] = json::parse(config_json);
  return j.dump(2) + "\n";
}

std::string condition_report_text(const ConditionReport& rep) {
  std::ostringstream os;
  os << "condition report: " << rep.system_name << " (beta = " << rep.beta
     << ")\n";
  os << std::scientific << std::setprecision(6);
  auto line = [&](const std::string& id, const CondScalar& c) {
    os << "  " << std::left << std::setw(8) << id << " value "
       << std::setw(14) << c.quad.value << "  err " << std::setw(12)
       << c.quad.abs_error_estimate << "  " << to_string(c.verdict);
    if (c.status != "ok") os << "  [" << c.status << "]";
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  };
  line("C1", rep.F1);
  line("C1'", rep.F1_prime);
  os << "  C2       sup   " << std::setw(14) << rep.C2.sup << "  at t = "
     << rep.C2.argmax_t << "  " << to_string(rep.C2.verdict) << "\n";
  line("C3", rep.F3);
  line("F4,1", rep.F4.f1);
  line("F4,2", rep.F4.f2);
  line("F4,3", rep.F4.f3);
  os << "  C4       " << to_string(rep.F4.verdict)
     << (rep.F4.f3_degenerate ? "  [kappa1 denominator degenerate]" : "")
     << "\n";
  line("F4,1'", rep.F4_prime.f1);
  line("F4,2'", rep.F4_prime.f2);
  line("F4,3'", rep.F4_prime.f3);
  os << "  C4'      " << to_string(rep.F4_prime.verdict) << "\n";
  line("C5", rep.F5);
  os << "  C6       " << (rep.C6.holds ? "holds" : "fails");
  if (rep.C6.witness)
    os << "  witness x = (" << rep.C6.witness->x.x << ", "
       << rep.C6.witness->x.y << "), t1 = " << rep.C6.witness->t1
       << ", t2 = " << rep.C6.witness->t2;
  os << "\n";
  return os.str();
}

std::string scan_json(const BifurcationScan& scan) {
  json j;
  j["slice"] = {{"var", to_string(scan.slice.var)},
                {"lo", scan.slice.lo},
                {"hi", scan.slice.hi},
                {"samples", scan.slice.samples},
                {"xi", scan.slice.xi},
                {"alpha", scan.slice.alpha},
                {"beta", scan.slice.beta}};
  j["eps_list"] = scan.eps_list;
  json roots = json::array();
  for (const ScanRoot& r : scan.roots)
    roots.push_back({{"epsilon", r.epsilon}, {"location", r.location}});
  j["roots"] = roots;
  j["roots_pos"] = scan.roots_pos;
  j["roots_neg"] = scan.roots_neg;
  j["classification"] = scan.classification;
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string orbit_csv(const HomoclinicOrbit& orbit, double T, double dt) {
  std::ostringstream os;
  os << "t,x,y\r\n";
  for (double t = -T; t <= T + 1e-12; t += dt) {
    const Vec2 g = orbit.gamma(t);
    os << fmt(t) << "," << fmt(g.x) << "," << fmt(g.y) << "\r\n";
  }
  return os.str();
}

std::string frame_csv(const VariationalFrame& frame) {
  std::ostringstream os;
  os << "t,gamma_prime_1,gamma_prime_2,zeta_1,zeta_2,delta\r\n";
  for (double t : frame.grid) {
    const Vec2 gp = frame.gamma_prime(t);
    const Vec2 z = frame.zeta(t);
    os << fmt(t) << "," << fmt(gp.x) << "," << fmt(gp.y) << "," << fmt(z.x)
       << "," << fmt(z.y) << "," << fmt(frame.delta(t)) << "\r\n";
  }
  return os.str();
}

std::string scan_csv(const BifurcationScan& scan) {
  std::ostringstream os;
  os << "epsilon," << to_string(scan.slice.var) << ",B,ok\r\n";
  for (std::size_t ie = 0; ie < scan.eps_list.size(); ++ie)
    for (const ScanPoint& p : scan.samples[ie])
      os << fmt(scan.eps_list[ie]) << "," << fmt(p.value) << "," << fmt(p.B)
         << "," << (p.ok ? 1 : 0) << "\r\n";
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "epsilon,distance,converged\r\n";
  for (const SweepRow& r : rows)
    os << fmt(r.epsilon) << "," << fmt(r.distance) << ","
       << (r.converged ? 1 : 0) << "\r\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace hgate
