#include "gfzf/field.hpp"

#include "gfzf/errors.hpp"

namespace gfzf {

Field::Field(GridSpec g) : grid(std::move(g)), values(Eigen::ArrayXd::Zero(grid.size())) {}

Field::Field(GridSpec g, Eigen::ArrayXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("field value count does not match grid size");
  }
}

Field Field::constant(const GridSpec& g, double value) {
  return Field(g, Eigen::ArrayXd::Constant(g.size(), value));
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw GridMismatch();
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return f.grid.cell_volume() * (f.values * g.values).sum();
}

double integral(const Field& f) { return f.grid.cell_volume() * f.values.sum(); }

double mean(const Field& f) { return f.values.mean(); }

double max_abs_difference(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return (a.values - b.values).abs().maxCoeff();
}

}  // namespace gfzf
