#include "weightlab/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace weightlab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

double dot(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}
} // namespace

DirectionSet::DirectionSet(int d, int m) : d_(d), m_(m) {
    if (d < 1 || d > 3) throw std::domain_error("DirectionSet: dim must be 1..3");
    if (m < 1) throw std::domain_error("DirectionSet: need at least one direction");
    dirs_.resize(static_cast<std::size_t>(m) * d);
    if (d == 1) {
        if (m != 1) throw std::domain_error("DirectionSet: d=1 has one direction");
        dirs_[0] = 1.0;
    } else if (d == 2) {
        for (int j = 0; j < m; ++j) {
            double th = kPi * j / m;
            dirs_[2 * j] = std::cos(th);
            dirs_[2 * j + 1] = std::sin(th);
        }
    } else {
        // Fibonacci lattice restricted to z > 0, so no antipodal pairs
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int j = 0; j < m; ++j) {
            double z = (j + 0.5) / m;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = 2.0 * kPi * j / golden;
            dirs_[3 * j] = r * std::cos(phi);
            dirs_[3 * j + 1] = r * std::sin(phi);
            dirs_[3 * j + 2] = z;
        }
    }
    // normalize defensively; keeps |u| = 1 to machine precision
    for (int j = 0; j < m; ++j) {
        double* u = dirs_.data() + static_cast<std::size_t>(j) * d;
        double n = euclidean_norm(u, d);
        for (int i = 0; i < d; ++i) u[i] /= n;
    }
}

std::shared_ptr<const DirectionSet> DirectionSet::canonical(int d) {
    static std::mutex mu;
    static std::shared_ptr<const DirectionSet> cache[4];
    if (d < 1 || d > 3) throw std::domain_error("DirectionSet: canonical set exists for d = 1..3");
    std::lock_guard<std::mutex> lock(mu);
    if (!cache[d]) {
        int m = d == 1 ? 1 : (d == 2 ? 180 : 512);
        cache[d] = std::make_shared<DirectionSet>(d, m);
    }
    return cache[d];
}

namespace {
DirsPtr pick_dirs(int d, DirsPtr dirs) {
    if (dirs) {
        if (dirs->dim() != d) throw std::domain_error("ConvexBody: direction set dimension mismatch");
        return dirs;
    }
    return DirectionSet::canonical(d);
}
} // namespace

ConvexBody ConvexBody::segment(std::vector<double> v, DirsPtr dirs) {
    ConvexBody b;
    b.kind_ = BodyKind::segment;
    b.d_ = static_cast<int>(v.size());
    b.seg_ = std::move(v);
    b.dirs_ = pick_dirs(b.d_, std::move(dirs));
    return b;
}

ConvexBody ConvexBody::ellipsoid(const SpdMatrix& a, DirsPtr dirs) {
    ConvexBody b;
    b.kind_ = BodyKind::ellipsoid;
    b.d_ = a.dim();
    b.ell_ = a;
    b.dirs_ = pick_dirs(b.d_, std::move(dirs));
    return b;
}

ConvexBody ConvexBody::sampled(std::vector<double> h, DirsPtr dirs) {
    if (!dirs) throw std::domain_error("ConvexBody: sampled body needs a direction set");
    if (h.size() != static_cast<std::size_t>(dirs->count()))
        throw std::domain_error("ConvexBody: support sample count mismatch");
    for (double v : h)
        if (!(v >= 0.0)) throw std::domain_error("ConvexBody: support values must be nonnegative");
    ConvexBody b;
    b.kind_ = BodyKind::sampled;
    b.d_ = dirs->dim();
    b.h_ = std::move(h);
    b.dirs_ = std::move(dirs);
    return b;
}

ConvexBody ConvexBody::zero(int d, DirsPtr dirs) {
    return segment(std::vector<double>(static_cast<std::size_t>(d), 0.0), std::move(dirs));
}

ConvexBody ConvexBody::unit_ball(int d, DirsPtr dirs) {
    return ellipsoid(SpdMatrix::identity(d), std::move(dirs));
}

ConvexBody ConvexBody::zonotope(const std::vector<std::vector<double>>& gens, DirsPtr dirs) {
    if (gens.empty()) throw std::domain_error("ConvexBody: zonotope needs generators");
    int d = static_cast<int>(gens.front().size());
    DirsPtr ds = pick_dirs(d, std::move(dirs));
    std::vector<double> h(static_cast<std::size_t>(ds->count()), 0.0);
    for (int j = 0; j < ds->count(); ++j)
        for (const auto& g : gens) h[static_cast<std::size_t>(j)] += std::fabs(dot(g.data(), ds->dir(j), d));
    return sampled(std::move(h), ds);
}

double ConvexBody::support(const double* u) const {
    double un = euclidean_norm(u, d_);
    if (std::fabs(un - 1.0) > 1e-9)
        throw std::domain_error("ConvexBody::support: direction must be a unit vector");
    switch (kind_) {
    case BodyKind::segment:
        return std::fabs(dot(seg_.data(), u, d_));
    case BodyKind::ellipsoid: {
        double tmp[kMaxDim];
        ell_.apply(u, tmp);
        return euclidean_norm(tmp, d_);
    }
    case BodyKind::sampled: {
        // exact on the sample set; off-grid the max of the two nearest
        // samples, conservative outward
        int m = dirs_->count();
        int best = 0, second = 0;
        double b1 = -1.0, b2 = -1.0;
        for (int j = 0; j < m; ++j) {
            double c = std::fabs(dot(u, dirs_->dir(j), d_));
            if (c > b1) {
                b2 = b1; second = best;
                b1 = c; best = j;
            } else if (c > b2) {
                b2 = c; second = j;
            }
        }
        if (b1 >= 1.0 - 1e-12) return h_[static_cast<std::size_t>(best)];
        return std::max(h_[static_cast<std::size_t>(best)], h_[static_cast<std::size_t>(second)]);
    }
    }
    return 0.0;
}

double ConvexBody::support_sample(int j) const {
    if (kind_ == BodyKind::sampled) return h_[static_cast<std::size_t>(j)];
    return support(dirs_->dir(j));
}

std::vector<double> ConvexBody::support_samples() const {
    if (kind_ == BodyKind::sampled) return h_;
    std::vector<double> h(static_cast<std::size_t>(dirs_->count()));
    for (int j = 0; j < dirs_->count(); ++j) h[static_cast<std::size_t>(j)] = support(dirs_->dir(j));
    return h;
}

bool ConvexBody::is_absorbing(double tol) const {
    for (int j = 0; j < dirs_->count(); ++j)
        if (!(support_sample(j) > tol)) return false;
    return true;
}

bool ConvexBody::convexity_check(double tol) const {
    if (d_ != 2 || kind_ != BodyKind::sampled) return true;
    int m = dirs_->count();
    for (int j = 0; j < m; ++j) {
        // u_j against its angular neighbors (antipodal wrap: h is even)
        int jl = (j + m - 1) % m;
        int jr = (j + 1) % m;
        const double* ul = dirs_->dir(jl);
        const double* ur = dirs_->dir(jr);
        const double* uc = dirs_->dir(j);
        double sl = (jl > j) ? -1.0 : 1.0; // wrapped neighbor is the antipode
        double sr = (jr < j) ? -1.0 : 1.0;
        // solve uc = a * sl*ul + b * sr*ur
        double a11 = sl * ul[0], a12 = sr * ur[0], a21 = sl * ul[1], a22 = sr * ur[1];
        double det = a11 * a22 - a12 * a21;
        if (std::fabs(det) < 1e-14) continue;
        double a = (uc[0] * a22 - uc[1] * a12) / det;
        double b = (a11 * uc[1] - a21 * uc[0]) / det;
        if (a < 0.0 || b < 0.0) continue;
        double lhs = h_[static_cast<std::size_t>(j)];
        double rhs = a * h_[static_cast<std::size_t>(jl)] + b * h_[static_cast<std::size_t>(jr)];
        if (lhs > rhs + tol * std::max(1.0, rhs)) return false;
    }
    return true;
}

namespace {

void require_compatible(const ConvexBody& k, const ConvexBody& l) {
    if (k.dim() != l.dim()) throw std::domain_error("ConvexBody: dimension mismatch");
    if (!k.dirs()->same_as(*l.dirs()))
        throw std::domain_error("ConvexBody: direction set mismatch");
}

bool collinear(const std::vector<double>& a, const std::vector<double>& b) {
    int d = static_cast<int>(a.size());
    double na = euclidean_norm(a.data(), d), nb = euclidean_norm(b.data(), d);
    if (na == 0.0 || nb == 0.0) return true;
    double c = dot(a.data(), b.data(), d);
    return std::fabs(std::fabs(c) - na * nb) <= 1e-14 * na * nb;
}

// B = c A for some c >= 0?
bool proportional(const SpdMatrix& a, const SpdMatrix& b, double* c_out) {
    int d = a.dim();
    double na = 0.0, nb = 0.0;
    for (int i = 0; i < d * d; ++i) {
        na = std::max(na, std::fabs(a.data()[i]));
        nb = std::max(nb, std::fabs(b.data()[i]));
    }
    if (na == 0.0 || nb == 0.0) return false;
    double c = -1.0;
    for (int i = 0; i < d * d; ++i) {
        double av = a.data()[i], bv = b.data()[i];
        if (std::fabs(av) <= 1e-15 * na) {
            if (std::fabs(bv) > 1e-15 * nb) return false;
            continue;
        }
        double r = bv / av;
        if (c < 0.0) c = r;
        else if (std::fabs(r - c) > 1e-13 * std::max(1.0, std::fabs(c))) return false;
    }
    if (c < 0.0) return false;
    if (c_out) *c_out = c;
    return true;
}

} // namespace

ConvexBody minkowski_sum(const ConvexBody& k, const ConvexBody& l) {
    require_compatible(k, l);
    if (k.kind() == BodyKind::segment && l.kind() == BodyKind::segment &&
        collinear(k.segment_vector(), l.segment_vector())) {
        const auto& a = k.segment_vector();
        const auto& b = l.segment_vector();
        int d = k.dim();
        double na = euclidean_norm(a.data(), d), nb = euclidean_norm(b.data(), d);
        if (na == 0.0) return l;
        if (nb == 0.0) return k;
        std::vector<double> v(a);
        double sc = (na + nb) / na;
        for (double& x : v) x *= sc;
        return ConvexBody::segment(std::move(v), k.dirs());
    }
    if (k.kind() == BodyKind::ellipsoid && l.kind() == BodyKind::ellipsoid) {
        double c = 0.0;
        if (proportional(k.ellipsoid_matrix(), l.ellipsoid_matrix(), &c))
            return ConvexBody::ellipsoid(k.ellipsoid_matrix() * (1.0 + c), k.dirs());
    }
    int m = k.dirs()->count();
    std::vector<double> h(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) h[static_cast<std::size_t>(j)] = k.support_sample(j) + l.support_sample(j);
    return ConvexBody::sampled(std::move(h), k.dirs());
}

ConvexBody scale(double alpha, const ConvexBody& k) {
    if (alpha < 0.0) throw std::domain_error("scale: factor must be nonnegative");
    switch (k.kind()) {
    case BodyKind::segment: {
        std::vector<double> v = k.segment_vector();
        for (double& x : v) x *= alpha;
        return ConvexBody::segment(std::move(v), k.dirs());
    }
    case BodyKind::ellipsoid:
        return ConvexBody::ellipsoid(k.ellipsoid_matrix() * alpha, k.dirs());
    case BodyKind::sampled: {
        std::vector<double> h = k.support_samples();
        for (double& x : h) x *= alpha;
        return ConvexBody::sampled(std::move(h), k.dirs());
    }
    }
    return k;
}

ConvexBody hull_union(const ConvexBody& k, const ConvexBody& l) {
    require_compatible(k, l);
    if (k.kind() == BodyKind::segment && l.kind() == BodyKind::segment &&
        collinear(k.segment_vector(), l.segment_vector())) {
        int d = k.dim();
        double na = euclidean_norm(k.segment_vector().data(), d);
        double nb = euclidean_norm(l.segment_vector().data(), d);
        return na >= nb ? k : l;
    }
    if (k.kind() == BodyKind::ellipsoid && l.kind() == BodyKind::ellipsoid) {
        double c = 0.0;
        if (proportional(k.ellipsoid_matrix(), l.ellipsoid_matrix(), &c))
            return c <= 1.0 ? k : l;
    }
    int m = k.dirs()->count();
    std::vector<double> h(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        h[static_cast<std::size_t>(j)] = std::max(k.support_sample(j), l.support_sample(j));
    return ConvexBody::sampled(std::move(h), k.dirs());
}

bool contains(const ConvexBody& k, const ConvexBody& l, double slack) {
    require_compatible(k, l);
    for (int j = 0; j < k.dirs()->count(); ++j)
        if (l.support_sample(j) > k.support_sample(j) * (1.0 + slack)) return false;
    return true;
}

double magnitude(const ConvexBody& k) {
    switch (k.kind()) {
    case BodyKind::segment:
        return euclidean_norm(k.segment_vector().data(), k.dim());
    case BodyKind::ellipsoid:
        return k.ellipsoid_matrix().op_norm();
    case BodyKind::sampled: {
        double m = 0.0;
        for (int j = 0; j < k.dirs()->count(); ++j) m = std::max(m, k.support_sample(j));
        return m;
    }
    }
    return 0.0;
}

ConvexBody apply_matrix(const SpdMatrix& a, const ConvexBody& k) {
    if (a.dim() != k.dim()) throw std::domain_error("apply_matrix: dimension mismatch");
    switch (k.kind()) {
    case BodyKind::segment: {
        std::vector<double> v(static_cast<std::size_t>(k.dim()));
        a.apply(k.segment_vector().data(), v.data());
        return ConvexBody::segment(std::move(v), k.dirs());
    }
    case BodyKind::ellipsoid: {
        // {A B x : |x|<=1} = ellipsoid((A B B A)^{1/2})
        const SpdMatrix& b = k.ellipsoid_matrix();
        Mat ab = mat_mul(a, b);
        SpdMatrix prod = SpdMatrix::identity(a.dim());
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j) {
                double s = 0.0;
                for (int t = 0; t < a.dim(); ++t) s += ab.at(i, t) * ab.at(j, t);
                prod.at(i, j) = s;
            }
        return ConvexBody::ellipsoid(prod.power(0.5), k.dirs());
    }
    case BodyKind::sampled: {
        // h_{AK}(u) = h_K(Au); evaluate via off-grid support of K
        int m = k.dirs()->count();
        std::vector<double> h(static_cast<std::size_t>(m));
        double tmp[kMaxDim];
        for (int j = 0; j < m; ++j) {
            a.apply(k.dirs()->dir(j), tmp);
            double n = euclidean_norm(tmp, k.dim());
            if (n == 0.0) {
                h[static_cast<std::size_t>(j)] = 0.0;
                continue;
            }
            for (int i = 0; i < k.dim(); ++i) tmp[i] /= n;
            h[static_cast<std::size_t>(j)] = n * k.support(tmp);
        }
        return ConvexBody::sampled(std::move(h), k.dirs());
    }
    }
    return k;
}

BodyField::BodyField(const DyadicGrid& g, int dd, DirsPtr dirs)
    : grid(g), d(dd),
      values(static_cast<std::size_t>(g.cell_count()),
             ConvexBody::zero(dd, dirs ? std::move(dirs) : DirectionSet::canonical(dd))) {}

} // namespace weightlab
