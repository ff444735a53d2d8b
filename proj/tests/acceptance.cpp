// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero if any criterion fails.

#include "gbcurv/cli.hpp"
#include "gbcurv/functionals.hpp"
#include "gbcurv/invariants.hpp"
#include "gbcurv/verification.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gbcurv;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("note " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cli::ManifoldSpec spec(const std::string& name) {
  return cli::load_spec(std::string(GBCURV_CATALOG_DIR) + "/" + name + ".json");
}

std::string describe(const VerificationReport& r) {
  return fmt("%s value=%.12g ref=%.12g abs=%.3g rel=%.3g tol=%.1g (%s, %.1fs)", r.test.c_str(),
             r.value, r.reference, r.abs_err, r.rel_err, r.tol, criterion_name(r.criterion).c_str(),
             r.seconds);
}

// Gauss-Bonnet runs also assert that the value is an integer within tol.
void gauss_bonnet(Outcome& c, const std::string& name, bool boundary, double tol,
                  double budget) {
  const auto s = spec(name);
  const auto chart = cli::build_chart(s);
  const int order = s.quadrature_order.value_or(16);
  const auto r = boundary ? gauss_bonnet_boundary(chart, s.euler_characteristic, order, tol)
                          : gauss_bonnet_closed(chart, s.euler_characteristic, order, tol);
  c.check(r.pass && r.seconds < budget, name + ": " + describe(r));
  c.check(r.detail("distance_to_integer") <= tol,
          fmt("%s integral is an integer within tol (distance %.3g)", name.c_str(),
              r.detail("distance_to_integer")));
}

Outcome criterion1() {
  Outcome c{1, "Gauss-Bonnet, closed manifolds"};
  gauss_bonnet(c, "sphere2", false, 1e-6, 1.0);
  gauss_bonnet(c, "torus2", false, 1e-12, 60.0);
  gauss_bonnet(c, "sphere4", false, 1e-4, 60.0);
  gauss_bonnet(c, "s2xs2", false, 1e-4, 60.0);
  {
    const auto s = spec("sphere3");
    const auto r = gauss_bonnet_closed(cli::build_chart(s), 0, s.quadrature_order.value_or(8), 0.0);
    c.check(r.value == 0.0, "sphere3: exact zero, " + describe(r));
  }
  gauss_bonnet(c, "torus2_lorentzian", false, 1e-12, 60.0);
  return c;
}

Outcome criterion2() {
  Outcome c{2, "Gauss-Bonnet, manifolds with boundary"};
  gauss_bonnet(c, "disc", true, 1e-8, 30.0);
  gauss_bonnet(c, "ball3", true, 1e-6, 30.0);
  gauss_bonnet(c, "hemisphere2", true, 1e-6, 30.0);
  gauss_bonnet(c, "cylinder", true, 1e-10, 30.0);
  return c;
}

// FD consistency: Richardson and single-step estimates differ by no more
// than the reported bound.
void fd_consistent(Outcome& c, const VerificationReport& r) {
  const double gap = std::abs(r.detail("lhs") - r.detail("lhs_single_step"));
  c.check(gap <= r.detail("fd_error_bound") + 1e-15,
          fmt("  FD consistency |rich - single| = %.3g <= bound %.3g", gap,
              r.detail("fd_error_bound")));
}

VerificationReport variational(const std::string& name, const std::string& pert, int n, int order,
                               double tol, gbcurv::Criterion crit, bool boundary) {
  const auto s = spec(name);
  VariationalOptions opt;
  opt.order = order;
  opt.tol = tol;
  opt.criterion = crit;
  const auto chart = cli::build_chart(s);
  const auto h = cli::build_perturbation(s, pert);
  auto r = boundary ? variational_check_boundary(chart, h, n, opt)
                    : variational_check_interior(chart, h, n, opt);
  r.test = name + "/" + (pert.empty() ? "default" : pert) + " n=" + std::to_string(n);
  return r;
}

Outcome criterion3() {
  Outcome c{3, "First variation, closed manifolds"};
  for (const char* p : {"conformal", "bump", "trig"}) {
    const auto r = variational("sphere4", p, 2, 12, 1e-4, gbcurv::Criterion::Relative, false);
    c.check(r.pass, describe(r));
    fd_consistent(c, r);
  }
  {
    const auto r = variational("sphere4", "conformal", 0, 12, 1e-8, gbcurv::Criterion::Relative, false);
    c.check(r.pass, describe(r));
    fd_consistent(c, r);
  }
  {
    const auto r = variational("sphere2", "ambient", 2, 24, 1e-6, gbcurv::Criterion::Absolute, false);
    c.check(r.pass && std::abs(r.detail("lhs")) <= 1e-6,
            describe(r) + fmt(" lhs=%.3g", r.detail("lhs")));
    fd_consistent(c, r);
  }
  return c;
}

Outcome criterion4() {
  Outcome c{4, "First variation, manifolds with boundary"};
  {
    // (a) h vanishes near the boundary. On the flat ball both sides are 0,
    // so the relative comparison runs on a curved spherical cap.
    const auto r = variational("cap3", "interior", 2, 12, 1e-3, gbcurv::Criterion::Relative, true);
    c.check(r.pass, "(a) " + describe(r));
    c.check(std::abs(r.detail("rhs_boundary")) <= 1e-12,
            fmt("  boundary part of the formula vanishes: %.3g", r.detail("rhs_boundary")));
    fd_consistent(c, r);
    const auto flat = variational("ball3", "interior", 2, 12, 1e-8, gbcurv::Criterion::Absolute, true);
    c.check(flat.pass, "(a) flat ball, absolute: " + describe(flat));
  }
  {
    // (b) general h with tangential boundary components
    for (const char* m : {"cap3", "ball3"}) {
      const auto r = variational(m, "general", 2, 12, 1e-3, gbcurv::Criterion::Relative, true);
      c.check(r.pass, "(b) " + describe(r) +
                          fmt(" [interior %.6g, boundary %.6g]", r.detail("rhs_interior"),
                              r.detail("rhs_boundary")));
      fd_consistent(c, r);
    }
  }
  {
    const auto r = variational("disc", "", 2, 24, 1e-6, gbcurv::Criterion::Absolute, true);
    c.check(r.pass && std::abs(r.detail("lhs")) <= 1e-6,
            describe(r) + fmt(" lhs=%.3g", r.detail("lhs")));
    fd_consistent(c, r);
  }
  return c;
}

Outcome criterion5() {
  Outcome c{5, "Universal curvature identities"};
  const auto t0 = Clock::now();
  const double tol_odd[] = {1e-12, 1e-12, 1e-11};
  for (int i = 0; i < 3; ++i) {
    const int d = 2 * i + 1;
    const auto r = identity_check(d, 1000, 2024 + d, tol_odd[i]);
    c.check(r.pass, describe(r));
  }
  for (int d : {2, 4, 6}) {
    const auto r = identity_check(d, 1000, 2024 + d, 1e-2);
    c.check(r.pass, describe(r));
  }
  for (const Signature& s : {Signature({-1, 1, 1}), Signature({-1, -1, 1})}) {
    const auto r = identity_check(3, 1000, 7, 1e-12, s);
    c.check(r.pass, s.to_string() + " " + describe(r));
  }
  const auto printed = identity_check(5, 1000, 2029, 1e-11, std::nullopt,
                                      IdentityCoefficients::Printed);
  c.note(fmt("FLAGGED: dimension 5 with coefficients (1,-12,3,24,16,-24,2,-8) leaves residual "
             "%.3g; the vanishing combination is (1,-12,3,-24,16,-24,-2,8)",
             printed.value));
  const double secs = since(t0);
  c.check(secs < 60.0, fmt("runtime %.1fs < 60s", secs));
  return c;
}

Outcome criterion6() {
  Outcome c{6, "Restriction to circle products"};
  for (const char* name : {"disc", "hemisphere2"})
    for (int sign : {1, -1}) {
      const auto r = restriction_product_check(cli::build_chart(spec(name)), std::nullopt, sign, 8, 1e-8);
      c.check(r.pass, std::string(name) + (sign > 0 ? " x S1(+) " : " x S1(-) ") + describe(r) +
                          fmt(" nodes=%g", r.detail("nodes")));
    }
  return c;
}

Outcome criterion7() {
  Outcome c{7, "Invariant admissible polynomials"};
  const auto t0 = Clock::now();
  const int expect[] = {1, 1, 2, 2, 3, 3};
  for (int m = 1; m <= 6; ++m) {
    const auto s = Signature::riemannian(m);
    const auto basis = invariant_subspace(m, s, KernelMethod::Certified);
    const int qc = cli::q_basis_count(m);
    std::vector<FormalPolynomial> qs;
    bool all_in = true;
    for (int k = (m - 1) % 2; k <= m - 1; k += 2) {
      qs.push_back(q_polynomial(m, k, s));
      all_in = all_in && is_invariant(qs.back(), s);
    }
    const int rank = rational_rank(qs);
    auto joint = basis;
    joint.insert(joint.end(), qs.begin(), qs.end());
    const int span = rational_rank(joint);
    const bool ok = static_cast<int>(basis.size()) == qc && qc == expect[m - 1] && all_in &&
                    rank == qc && span == qc;
    c.check(ok, fmt("m~=%d kernel=%zu Q_k=%d rank(Q)=%d rank(kernel+Q)=%d all Q_k invariant=%s",
                    m, basis.size(), qc, rank, span, all_in ? "yes" : "no"));
    const int stated = cli::stated_invariant_count(m);
    if (stated != static_cast<int>(basis.size()))
      c.note(fmt("FLAGGED: m~=%d closed-form count %d differs from the exact kernel dimension %zu",
                 m, stated, basis.size()));
  }
  const double secs = since(t0);
  c.check(secs < 120.0, fmt("runtime %.1fs < 120s", secs));
  return c;
}

Outcome criterion8() {
  Outcome c{8, "Exchange property"};
  for (int m = 1; m <= 4; ++m) {
    const auto s = Signature::riemannian(m);
    std::size_t violations = 0, pairs = 0;
    const auto basis = invariant_subspace(m, s);
    for (const auto& p : basis)
      for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b) {
          if (a == b) continue;
          violations += exchange_check(p, a, b, s).size();
          ++pairs;
        }
    c.check(violations == 0, fmt("m~=%d basis=%zu (a,b) pairs=%zu violations=%zu", m, basis.size(),
                                 pairs, violations));
  }
  return c;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double s = b.cwiseAbs().maxCoeff();
  const double d = (a - b).cwiseAbs().maxCoeff();
  return s == 0.0 ? d : d / s;
}

// Random (signature, degree) draws at m <= 5 with non-trivial targets.
Outcome criterion9() {
  Outcome c{9, "Oracle equivalence"};
  std::mt19937_64 rng(99);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 100; ++t) {
    const int m = pick(2, 5);
    const Signature s = Signature::with_timelike(m, pick(0, m));
    const auto r = random_curvature(m, rng());
    const int n = 2 * pick(1, m / 2);
    worst[0] = std::max(worst[0], rel_err(euler_form(r, s, n), oracle::euler_form(r, s, n)));
    const int ne = 2 * pick(0, (m - 1) / 2);
    worst[1] = std::max(worst[1], rel_err(interior_el_tensor(r, s, ne).matrix(),
                                          oracle::interior_el(r, s, ne)));
    const Signature st = s.tangential();
    const int d = m - 1;
    const auto rt = random_curvature(d, rng());
    const SecondFundamentalForm l(oracle::random_symmetric(d, static_cast<unsigned>(rng())));
    const int nb = pick(1, m);
    const int nu = pick(0, (nb - 1) / 2);
    worst[2] = std::max(worst[2], rel_err(boundary_transgression(rt, l, st, nb, nu),
                                          oracle::transgression(rt, l, st, nb, nu)));
    const int nf = pick(1, d);
    const int nuf = pick(0, (nf - 1) / 2);
    worst[3] = std::max(worst[3], rel_err(boundary_el_tensor(rt, l, st, nf, nuf).matrix(),
                                          oracle::boundary_el(rt, l, st, nf, nuf)));
  }
  const char* names[] = {"Euler form", "interior EL tensor", "transgression form",
                         "boundary EL tensor"};
  for (int i = 0; i < 4; ++i)
    c.check(worst[i] <= 1e-12, fmt("%s: 100 inputs, max relative error %.3g", names[i], worst[i]));
  return c;
}

Outcome criterion10() {
  Outcome c{10, "Frame independence"};
  std::mt19937_64 rng(10);
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 100; ++t) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const Signature s = Signature::with_timelike(m, static_cast<int>(rng() % (m + 1)));
    const auto r = random_curvature(m, rng());
    const auto o = random_frame_change(s, rng());
    const auto r2 = r.transformed(o);
    const int n = 2 * (m / 2);
    worst[0] = std::max(worst[0], rel_err(euler_form(r2, s, n), euler_form(r, s, n)));
    worst[1] = std::max(worst[1], rel_err(interior_el_tensor(r2, s, 2).matrix(),
                                          interior_el_tensor(r, s, 2).contravariant_transform(o).matrix()));
    // boundary: frame changes fix the normal, so act on tangential indices
    const Signature st = s.appended(1).tangential();
    const int d = st.dim();
    const auto rt = random_curvature(d, rng());
    const Eigen::MatrixXd lm = oracle::random_symmetric(d, static_cast<unsigned>(rng()));
    const auto ot = random_frame_change(st, rng());
    const SecondFundamentalForm l(lm), l2(SymTwoTensor(lm).covariant_transform(ot));
    const auto rt2 = rt.transformed(ot);
    const int nb = d + 1;
    worst[2] = std::max(worst[2], rel_err(boundary_transgression(rt2, l2, st, nb),
                                          boundary_transgression(rt, l, st, nb)));
    worst[3] = std::max(worst[3],
                        rel_err(boundary_el_tensor(rt2, l2, st, d).matrix(),
                                boundary_el_tensor(rt, l, st, d).contravariant_transform(ot).matrix()));
  }
  c.check(worst[0] <= 1e-10, fmt("Euler form invariant: max rel change %.3g", worst[0]));
  c.check(worst[1] <= 1e-10, fmt("interior EL tensor covariant: max rel error %.3g", worst[1]));
  c.check(worst[2] <= 1e-10, fmt("transgression form invariant: max rel change %.3g", worst[2]));
  c.check(worst[3] <= 1e-10, fmt("boundary EL tensor covariant: max rel error %.3g", worst[3]));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> all = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  std::vector<std::string> summary;
  for (const auto& run : all) {
    const auto t0 = Clock::now();
    Outcome c{0, ""};
    try {
      c = run();
    } catch (const std::exception& e) {
      c.id = static_cast<int>(summary.size()) + 1;
      c.title = "(exception)";
      c.check(false, e.what());
    }
    const std::string line = fmt("[%s] %2d %s (%.1fs)", c.pass ? "PASS" : "FAIL", c.id,
                                 c.title.c_str(), since(t0));
    std::printf("%s\n", line.c_str());
    for (const auto& l : c.lines) std::printf("       %s\n", l.c_str());
    std::fflush(stdout);
    summary.push_back(line);
    failed += c.pass ? 0 : 1;
  }
  std::printf("\nsummary\n");
  for (const auto& l : summary) std::printf("%s\n", l.c_str());
  return failed == 0 ? 0 : 1;
}
