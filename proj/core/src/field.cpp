#include "nullcone/field.hpp"

#include <algorithm>
#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_ ? grid_->size() : 0, fill) {
  if (!grid_) throw InvalidArgument("ScalarField: null grid");
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("ScalarField: null grid");
  if (static_cast<int>(values_.size()) != grid_->size())
    throw InvalidArgument("ScalarField: value count does not match grid size");
}

ScalarField ScalarField::from_function(GridPtr grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  const auto& g = out.grid();
  for (int i = 0; i < g.nlat(); ++i)
    for (int j = 0; j < g.nlon(); ++j)
      out[g.node_index(i, j)] = f(g.colatitudes()[i], g.longitudes()[j]);
  return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double ScalarField::integrate() const {
  // Latitude rows share a weight; sum rows first for a little extra accuracy.
  const auto& g = *grid_;
  double total = 0.0;
  for (int i = 0; i < g.nlat(); ++i) {
    double row = 0.0;
    const int base = i * g.nlon();
    for (int j = 0; j < g.nlon(); ++j) row += values_[base + j];
    total += row * g.node_weight(i);
  }
  return total;
}

ScalarField ScalarField::map(const std::function<double(double)>& f) const {
  ScalarField out(grid_);
  for (int i = 0; i < size(); ++i) out[i] = f(values_[i]);
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (&a.grid() == &b.grid()) return;
  if (!a.grid().same_layout(b.grid()))
    throw InvalidArgument("ScalarField: operands live on different grid layouts");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid_);
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid_);
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a.grid_);
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid_);
  for (int i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

ScalarField operator+(const ScalarField& a, double s) {
  ScalarField out(a.grid_);
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] + s;
  return out;
}

}  // namespace nullcone
