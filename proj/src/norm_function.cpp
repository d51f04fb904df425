#include "weightlab/norm_function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace weightlab {

NormFunction NormFunction::from_matrix_weight(std::shared_ptr<const MatrixField> w) {
    NormFunction n;
    n.d_ = w->d;
    n.dirs_ = DirectionSet::canonical(w->d);
    n.w_ = std::move(w);
    return n;
}

NormFunction NormFunction::from_body_field(std::shared_ptr<const BodyField> f) {
    NormFunction n;
    n.d_ = f->d;
    n.dirs_ = f->values.empty() ? DirectionSet::canonical(f->d) : f->values.front().dirs();
    n.f_ = std::move(f);
    return n;
}

const DyadicGrid& NormFunction::grid() const { return w_ ? w_->grid : f_->grid; }

double NormFunction::eval(index_t cell, const double* v) const {
    if (w_) {
        double tmp[kMaxDim];
        w_->values[static_cast<std::size_t>(cell)].apply(v, tmp);
        return euclidean_norm(tmp, d_);
    }
    const ConvexBody& k = f_->values[static_cast<std::size_t>(cell)];
    // Minkowski gauge via the polar: rho_K(v) = sup_u <v,u>/h_K(u)
    if (k.kind() == BodyKind::ellipsoid)
        return [&] {
            double tmp[kMaxDim];
            k.ellipsoid_matrix().power(-1.0).apply(v, tmp);
            return euclidean_norm(tmp, d_);
        }();
    double best = 0.0;
    for (int j = 0; j < dirs_->count(); ++j) {
        double num = 0.0;
        for (int i = 0; i < d_; ++i) num += v[i] * dirs_->dir(j)[i];
        num = std::fabs(num);
        double h = k.support_sample(j);
        if (h <= 0.0) {
            if (num > 0.0)
                throw std::runtime_error("NormFunction: body not absorbing in direction " +
                                          std::to_string(j) + " at cell " + std::to_string(cell));
            continue;
        }
        best = std::max(best, num / h);
    }
    return best;
}

double NormFunction::dual(index_t cell, const double* v) const {
    if (w_) {
        bool clamped = false;
        double tmp[kMaxDim];
        w_->values[static_cast<std::size_t>(cell)].power_clamped(-1.0, &clamped).apply(v, tmp);
        return euclidean_norm(tmp, d_);
    }
    // gauge dualizes back to the support function
    const ConvexBody& k = f_->values[static_cast<std::size_t>(cell)];
    double n = euclidean_norm(v, d_);
    if (n == 0.0) return 0.0;
    double unit[kMaxDim];
    for (int i = 0; i < d_; ++i) unit[i] = v[i] / n;
    return n * k.support(unit);
}

double NormFunction::dual_sampled(index_t cell, const double* v) const {
    double best = 0.0;
    for (int j = 0; j < dirs_->count(); ++j) {
        double r = eval(cell, dirs_->dir(j));
        if (!(r > 0.0))
            throw std::runtime_error("NormFunction::dual_sampled: degenerate norm in direction " +
                                      std::to_string(j) + " at cell " + std::to_string(cell));
        double num = 0.0;
        for (int i = 0; i < d_; ++i) num += v[i] * dirs_->dir(j)[i];
        best = std::max(best, std::fabs(num) / r);
    }
    return best;
}

double p_average_norm(const NormFunction& rho, const Cube& q, double p, const double* v) {
    if (p < 1.0) throw std::domain_error("p_average_norm: p must be >= 1");
    auto cells = cells_of_cube(rho.grid(), q);
    double sum = 0.0;
    for (index_t c : cells) sum += std::pow(rho.eval(c, v), p);
    return std::pow(sum / static_cast<double>(cells.size()), 1.0 / p);
}

} // namespace weightlab
