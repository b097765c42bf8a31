#include "gaussig/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <unordered_map>

#include "gaussig/error.hpp"
#include "gaussig/simd.hpp"

namespace gaussig {

namespace {

std::vector<double> merge_breaks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  for (double x : a) {
    if (out.empty() || std::fabs(x - out.back()) > 1e-12 * std::max(1.0, std::fabs(x))) out.push_back(x);
  }
  return out;
}

void require_same_dim(const Field& a, const Field& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("fields have different dimensions");
}

}  // namespace

Field::Field(std::size_t dim, BatchFn fn, std::vector<double> breakpoints)
    : dim_(dim), fn_(std::move(fn)), breaks_(merge_breaks(std::move(breakpoints), {})) {
  if (dim_ == 0) throw DimensionMismatch("field dimension must be positive");
  if (dim_ > 1) breaks_.clear();
}

void Field::eval(const double* coords, std::size_t count, double* out) const {
  if (count == 0) return;
  fn_(coords, count, out);
}

double Field::operator()(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, field has " +
                            std::to_string(dim_));
  }
  double out = 0.0;
  fn_(x.data(), 1, &out);
  return out;
}

double Field::operator()(std::initializer_list<double> x) const {
  return (*this)(std::span<const double>(x.begin(), x.size()));
}

Field Field::with_breakpoints(std::vector<double> extra) const {
  Field f = *this;
  if (dim_ == 1) f.breaks_ = merge_breaks(breaks_, extra);
  return f;
}

Field to_field(const Expr& e, std::size_t dim) {
  if (dim < e.arity()) {
    throw DimensionMismatch("expression reads " + std::to_string(e.arity()) + " coordinates, field has " +
                            std::to_string(dim));
  }
  std::vector<double> breaks;
  if (dim == 1) breaks = kinks_1d(e);
  return Field(
      dim, [e, dim](const double* coords, std::size_t count, double* out) { evaluate_batch(e, coords, dim, count, out); },
      std::move(breaks));
}

Field constant_field(double c, std::size_t dim) {
  return Field(dim, [c](const double*, std::size_t count, double* out) { std::fill(out, out + count, c); });
}

Field map(const Field& f, std::function<double(double)> g) {
  return Field(
      f.dim(),
      [f, g](const double* coords, std::size_t count, double* out) {
        f.eval(coords, count, out);
        for (std::size_t i = 0; i < count; ++i) out[i] = g(out[i]);
      },
      f.breakpoints());
}

Field zip(const Field& a, const Field& b, std::function<double(double, double)> g) {
  require_same_dim(a, b);
  return Field(
      a.dim(),
      [a, b, g](const double* coords, std::size_t count, double* out) {
        std::vector<double> tmp(count);
        a.eval(coords, count, out);
        b.eval(coords, count, tmp.data());
        for (std::size_t i = 0; i < count; ++i) out[i] = g(out[i], tmp[i]);
      },
      merge_breaks(a.breakpoints(), b.breakpoints()));
}

namespace {

using Kernel = void (*)(const double*, const double*, double*, std::size_t);

Field binary(const Field& a, const Field& b, Kernel simd::KernelTable::*which) {
  require_same_dim(a, b);
  return Field(
      a.dim(),
      [a, b, which](const double* coords, std::size_t count, double* out) {
        std::vector<double> tmp(count);
        a.eval(coords, count, out);
        b.eval(coords, count, tmp.data());
        (simd::active().*which)(out, tmp.data(), out, count);
      },
      merge_breaks(a.breakpoints(), b.breakpoints()));
}

}  // namespace

Field operator+(const Field& a, const Field& b) { return binary(a, b, &simd::KernelTable::add); }
Field operator-(const Field& a, const Field& b) { return binary(a, b, &simd::KernelTable::sub); }
Field operator*(const Field& a, const Field& b) { return binary(a, b, &simd::KernelTable::mul); }

Field operator*(double c, const Field& a) {
  return Field(
      a.dim(),
      [a, c](const double* coords, std::size_t count, double* out) {
        a.eval(coords, count, out);
        simd::active().scale(out, c, out, count);
      },
      a.breakpoints());
}

Field operator+(const Field& a, double c) {
  return Field(
      a.dim(),
      [a, c](const double* coords, std::size_t count, double* out) {
        a.eval(coords, count, out);
        simd::active().add_scalar(out, c, out, count);
      },
      a.breakpoints());
}

Field memoize(const Field& f) {
  struct Cache {
    std::mutex mu;
    std::unordered_multimap<std::uint64_t, std::pair<std::vector<double>, std::vector<double>>> entries;
  };
  auto cache = std::make_shared<Cache>();
  return Field(
      f.dim(),
      [f, cache](const double* coords, std::size_t count, double* out) {
        const std::size_t len = f.dim() * count;
        std::uint64_t h = 1469598103934665603ull;
        const auto* bytes = reinterpret_cast<const unsigned char*>(coords);
        for (std::size_t i = 0; i < len * sizeof(double); ++i) h = (h ^ bytes[i]) * 1099511628211ull;
        {
          std::lock_guard<std::mutex> lock(cache->mu);
          auto range = cache->entries.equal_range(h);
          for (auto it = range.first; it != range.second; ++it) {
            const auto& [key, vals] = it->second;
            if (key.size() == len && std::memcmp(key.data(), coords, len * sizeof(double)) == 0) {
              std::copy(vals.begin(), vals.end(), out);
              return;
            }
          }
        }
        f.eval(coords, count, out);
        std::lock_guard<std::mutex> lock(cache->mu);
        cache->entries.emplace(h, std::make_pair(std::vector<double>(coords, coords + len), std::vector<double>(out, out + count)));
      },
      f.breakpoints());
}

std::vector<double> zeros_1d(const Field& f, double bound) {
  if (f.dim() != 1) throw DimensionMismatch("zeros_1d needs a one-dimensional field");
  constexpr std::size_t kGrid = 4001;
  std::vector<double> xs(kGrid), vs(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) xs[i] = -bound + 2.0 * bound * static_cast<double>(i) / (kGrid - 1);
  f.eval(xs.data(), kGrid, vs.data());
  std::vector<double> out;
  for (std::size_t i = 0; i < kGrid; ++i) {
    if (vs[i] == 0.0) {
      out.push_back(xs[i]);
      continue;
    }
    if (i + 1 < kGrid && vs[i + 1] != 0.0 && (vs[i] < 0.0) != (vs[i + 1] < 0.0)) {
      double lo = xs[i], hi = xs[i + 1];
      const bool lo_negative = vs[i] < 0.0;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = f({mid});
        if (v == 0.0) {
          lo = hi = mid;
          break;
        }
        ((v < 0.0) == lo_negative ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
  }
  return merge_breaks(out, {});
}

Field outside_ball(const Field& f, double R) {
  const std::size_t n = f.dim();
  std::vector<double> breaks = f.breakpoints();
  if (n == 1) {
    breaks.push_back(-R);
    breaks.push_back(R);
  }
  return Field(
      n,
      [f, R, n](const double* coords, std::size_t count, double* out) {
        f.eval(coords, count, out);
        for (std::size_t i = 0; i < count; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += coords[j * count + i] * coords[j * count + i];
          if (!(s > R * R)) out[i] = 0.0;
        }
      },
      std::move(breaks));
}

}  // namespace gaussig
