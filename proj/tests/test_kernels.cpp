#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "goalgen/kernels.hpp"

using namespace goalgen;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool close_vec(const std::vector<double>& a, const std::vector<double>& b,
               double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i], b[i], tol)) return false;
  }
  return true;
}

struct BackendGuard {
  kern::Backend saved;
  BackendGuard() : saved(kern::active_backend()) {}
  ~BackendGuard() { kern::force_backend(saved); }
};

}  // namespace

TEST_CASE("scalar and avx2 variants agree on every op") {
  BackendGuard guard;
  const bool has_avx2 = kern::force_backend(kern::Backend::avx2) == kern::Backend::avx2;
  if (!has_avx2) {
    MESSAGE("avx2 unavailable on this machine; dispatch falls back to scalar");
    return;
  }
  std::mt19937_64 rng(7);
  // Sizes straddling the 4-lane and 8-lane boundaries.
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 31u, 32u, 33u,
                        63u, 100u, 127u, 256u, 301u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);

    kern::force_backend(kern::Backend::scalar);
    const double dot_s = kern::dot(a.data(), b.data(), n);
    kern::force_backend(kern::Backend::avx2);
    const double dot_v = kern::dot(a.data(), b.data(), n);
    CHECK(close(dot_s, dot_v));

    auto ys = b, yv = b;
    kern::force_backend(kern::Backend::scalar);
    kern::axpy(0.37, a.data(), ys.data(), n);
    kern::force_backend(kern::Backend::avx2);
    kern::axpy(0.37, a.data(), yv.data(), n);
    CHECK(close_vec(ys, yv));

    auto xs = a, xv = a;
    kern::force_backend(kern::Backend::scalar);
    kern::scale(-1.75, xs.data(), n);
    kern::force_backend(kern::Backend::avx2);
    kern::scale(-1.75, xv.data(), n);
    CHECK(close_vec(xs, xv));

    auto rs = a, rv = a;
    kern::force_backend(kern::Backend::scalar);
    kern::relu(rs.data(), n);
    kern::force_backend(kern::Backend::avx2);
    kern::relu(rv.data(), n);
    CHECK(close_vec(rs, rv));

    std::vector<double> os(n), ov(n);
    kern::force_backend(kern::Backend::scalar);
    kern::relu_backward(a.data(), b.data(), os.data(), n);
    kern::force_backend(kern::Backend::avx2);
    kern::relu_backward(a.data(), b.data(), ov.data(), n);
    CHECK(close_vec(os, ov));

    auto act = a;
    for (auto& v : act) v = std::tanh(v);
    kern::force_backend(kern::Backend::scalar);
    kern::tanh_backward(act.data(), b.data(), os.data(), n);
    kern::force_backend(kern::Backend::avx2);
    kern::tanh_backward(act.data(), b.data(), ov.data(), n);
    CHECK(close_vec(os, ov));
  }
}

TEST_CASE("matrix kernels agree across backends") {
  BackendGuard guard;
  if (kern::force_backend(kern::Backend::avx2) != kern::Backend::avx2) return;
  std::mt19937_64 rng(11);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1},
                            {3, 5},
                            {32, 34},
                            {128, 4},
                            {256, 256},
                            {7, 129}}) {
    const auto w = random_vec(rng, rows * cols);
    const auto x = random_vec(rng, cols);
    const auto bias = random_vec(rng, rows);
    const auto g = random_vec(rng, rows);

    std::vector<double> ys(rows), yv(rows);
    kern::force_backend(kern::Backend::scalar);
    kern::matvec(w.data(), rows, cols, x.data(), bias.data(), ys.data());
    kern::force_backend(kern::Backend::avx2);
    kern::matvec(w.data(), rows, cols, x.data(), bias.data(), yv.data());
    CHECK(close_vec(ys, yv));

    std::vector<double> ts(cols), tv(cols);
    kern::force_backend(kern::Backend::scalar);
    kern::matvec_t(w.data(), rows, cols, g.data(), ts.data());
    kern::force_backend(kern::Backend::avx2);
    kern::matvec_t(w.data(), rows, cols, g.data(), tv.data());
    CHECK(close_vec(ts, tv, 1e-11));

    auto ws = w, wv = w;
    kern::force_backend(kern::Backend::scalar);
    kern::rank1_update(ws.data(), rows, cols, g.data(), x.data(), 0.9);
    kern::force_backend(kern::Backend::avx2);
    kern::rank1_update(wv.data(), rows, cols, g.data(), x.data(), 0.9);
    CHECK(close_vec(ws, wv));
  }
}

TEST_CASE("matvec matches a hand-rolled reference") {
  // 2x3 example computed by hand.
  const std::vector<double> w = {1, 2, 3, 4, 5, 6};
  const std::vector<double> x = {1, 0, -1};
  const std::vector<double> bias = {10, 20};
  std::vector<double> y(2);
  kern::matvec(w.data(), 2, 3, x.data(), bias.data(), y.data());
  CHECK(y[0] == doctest::Approx(1 - 3 + 10));
  CHECK(y[1] == doctest::Approx(4 - 6 + 20));
}

TEST_CASE("force_backend reports the backend actually in use") {
  BackendGuard guard;
  CHECK(kern::force_backend(kern::Backend::scalar) == kern::Backend::scalar);
  const auto chosen = kern::force_backend(kern::Backend::avx2);
  CHECK((chosen == kern::Backend::avx2 || chosen == kern::Backend::scalar));
}
