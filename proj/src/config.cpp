#include "weightlab/config.hpp"
#include "weightlab/field_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace weightlab {

std::string WeightSpec::to_string() const {
    std::ostringstream ss;
    switch (kind) {
    case Kind::constant:
        ss << "constant(" << format_double(value) << ")";
        break;
    case Kind::power:
        ss << "power(" << format_double(exponent) << ")";
        break;
    case Kind::random:
        ss << "random(" << seed << "," << format_double(roughness) << ")";
        break;
    case Kind::diagonal: {
        ss << "diagonal(";
        for (std::size_t i = 0; i < exponents.size(); ++i)
            ss << (i ? "," : "") << format_double(exponents[i]);
        ss << ")";
        break;
    }
    case Kind::rotated_diagonal: {
        ss << "rotated-diagonal(" << seed;
        for (double e : exponents) ss << "," << format_double(e);
        ss << ")";
        break;
    }
    }
    return ss.str();
}

WeightSpec WeightSpec::parse(const std::string& text) {
    WeightSpec s;
    auto open = text.find('(');
    std::string name = open == std::string::npos ? text : text.substr(0, open);
    std::vector<std::string> args;
    if (open != std::string::npos) {
        auto close = text.rfind(')');
        if (close == std::string::npos || close < open)
            throw std::invalid_argument("weight spec: unbalanced parentheses in " + text);
        std::string inner = text.substr(open + 1, close - open - 1);
        std::istringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(tok);
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw std::invalid_argument("weight spec " + name + ": expected " + std::to_string(n) +
                                        " arguments");
    };
    if (name == "constant") {
        s.kind = Kind::constant;
        s.value = args.empty() ? 1.0 : std::stod(args[0]);
    } else if (name == "power") {
        s.kind = Kind::power;
        want(1);
        s.exponent = std::stod(args[0]);
    } else if (name == "random") {
        s.kind = Kind::random;
        if (args.size() < 1 || args.size() > 2)
            throw std::invalid_argument("weight spec random: expected (seed[,roughness])");
        s.seed = std::stoull(args[0]);
        if (args.size() == 2) s.roughness = std::stod(args[1]);
    } else if (name == "diagonal") {
        s.kind = Kind::diagonal;
        if (args.empty()) throw std::invalid_argument("weight spec diagonal: needs exponents");
        for (const auto& a : args) s.exponents.push_back(std::stod(a));
    } else if (name == "rotated-diagonal") {
        s.kind = Kind::rotated_diagonal;
        if (args.empty()) throw std::invalid_argument("weight spec rotated-diagonal: needs a seed");
        s.seed = std::stoull(args[0]);
        for (std::size_t i = 1; i < args.size(); ++i) s.exponents.push_back(std::stod(args[i]));
    } else {
        throw std::invalid_argument("weight spec: unknown generator " + name);
    }
    return s;
}

std::string ExperimentConfig::to_kv() const {
    std::ostringstream ss;
    ss << "d=" << d << "\n";
    ss << "depth=" << depth << "\n";
    ss << "dim=" << dim << "\n";
    ss << "experiment=" << experiment << "\n";
    ss << "out_dir=" << out_dir << "\n";
    ss << "p=" << format_double(p) << "\n";
    ss << "seed=" << seed << "\n";
    ss << "sparse_family=" << sparse_family << "\n";
    ss << "trials=" << trials << "\n";
    ss << "truncation=" << truncation << "\n";
    ss << "weight=" << weight.to_string() << "\n";
    return ss.str();
}

ExperimentConfig ExperimentConfig::from_kv(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got " + line);
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "experiment") cfg.experiment = val;
        else if (key == "depth") cfg.depth = std::stoi(val);
        else if (key == "dim") cfg.dim = std::stoi(val);
        else if (key == "d") cfg.d = std::stoi(val);
        else if (key == "p") cfg.p = std::stod(val);
        else if (key == "weight") cfg.weight = WeightSpec::parse(val);
        else if (key == "trials") cfg.trials = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "truncation") cfg.truncation = std::stoi(val);
        else if (key == "sparse_family") cfg.sparse_family = val;
        else if (key == "out_dir") cfg.out_dir = val;
        else throw std::invalid_argument("config: unknown key " + key);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_kv(ss.str());
}

void ExperimentConfig::validate() const {
    if (depth < 0 || depth > 14) throw std::invalid_argument("config field depth: out of range");
    if (dim != 1 && dim != 2) throw std::invalid_argument("config field dim: must be 1 or 2");
    if (d < 1 || d > 4) throw std::invalid_argument("config field d: must be 1..4");
    if (!(p >= 1.0)) throw std::invalid_argument("config field p: must be >= 1");
    if (trials < 1) throw std::invalid_argument("config field trials: must be >= 1");
    if (truncation < 1) throw std::invalid_argument("config field truncation: must be >= 1");
    if (sparse_family != "nested-halves" && sparse_family != "random" &&
        sparse_family != "stopping-time")
        throw std::invalid_argument("config field sparse_family: unknown family");
}

ScalarField make_power_weight(const DyadicGrid& g, double a) {
    if (g.dim != 1) throw std::invalid_argument("power weight: 1D grids only");
    ScalarField w(g);
    double h = 1.0 / static_cast<double>(g.side());
    double off = std::ldexp(1.0, -g.depth);
    for (index_t c = 0; c < g.side(); ++c)
        w.values[static_cast<std::size_t>(c)] =
            std::pow((static_cast<double>(c) + 0.5) * h + off, a);
    return w;
}

ScalarField make_random_positive(const DyadicGrid& g, std::uint64_t seed, double roughness) {
    Rng rng(seed);
    ScalarField w(g);
    for (double& v : w.values) v = std::exp(roughness * rng.normal());
    return w;
}

ScalarField make_scalar_weight(const DyadicGrid& g, const WeightSpec& spec) {
    switch (spec.kind) {
    case WeightSpec::Kind::constant:
        return ScalarField(g, spec.value);
    case WeightSpec::Kind::power:
        return make_power_weight(g, spec.exponent);
    case WeightSpec::Kind::random:
        return make_random_positive(g, spec.seed, spec.roughness);
    default:
        throw std::invalid_argument("weight spec: matrix generator used for a scalar weight");
    }
}

namespace {

SpdMatrix rotation_conjugated_diag(const std::vector<double>& diag, double angle, int d) {
    // R diag R^T for a 2D rotation embedded in the leading block
    SpdMatrix m = SpdMatrix::diagonal(diag);
    if (d < 2) return m;
    double c = std::cos(angle), s = std::sin(angle);
    SpdMatrix out = m;
    double a = diag[0], b = diag[1];
    out.at(0, 0) = c * c * a + s * s * b;
    out.at(0, 1) = c * s * (a - b);
    out.at(1, 0) = out.at(0, 1);
    out.at(1, 1) = s * s * a + c * c * b;
    return out;
}

} // namespace

MatrixField make_matrix_weight(const DyadicGrid& g, int d, const WeightSpec& spec) {
    MatrixField w(g, d);
    switch (spec.kind) {
    case WeightSpec::Kind::constant: {
        for (auto& m : w.values) m = SpdMatrix::scalar(d, spec.value);
        return w;
    }
    case WeightSpec::Kind::power: {
        ScalarField s = make_power_weight(g, spec.exponent);
        for (index_t c = 0; c < g.cell_count(); ++c)
            w.values[static_cast<std::size_t>(c)] =
                SpdMatrix::scalar(d, s.values[static_cast<std::size_t>(c)]);
        return w;
    }
    case WeightSpec::Kind::random: {
        // lognormal eigenvalues in a per-cell random frame
        Rng rng(spec.seed);
        for (auto& m : w.values) {
            std::vector<double> diag(static_cast<std::size_t>(d));
            for (double& v : diag) v = std::exp(spec.roughness * rng.normal());
            double angle = rng.uniform(0.0, 3.141592653589793);
            m = rotation_conjugated_diag(diag, d >= 2 ? angle : 0.0, d);
        }
        return w;
    }
    case WeightSpec::Kind::diagonal: {
        if (static_cast<int>(spec.exponents.size()) != d)
            throw std::invalid_argument("weight spec diagonal: needs d exponents");
        std::vector<ScalarField> comps;
        for (double a : spec.exponents) comps.push_back(make_power_weight(g, a));
        for (index_t c = 0; c < g.cell_count(); ++c) {
            std::vector<double> diag(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                diag[static_cast<std::size_t>(i)] =
                    comps[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(c)];
            w.values[static_cast<std::size_t>(c)] = SpdMatrix::diagonal(diag);
        }
        return w;
    }
    case WeightSpec::Kind::rotated_diagonal: {
        std::vector<double> exps = spec.exponents;
        Rng rng(spec.seed);
        double angle = rng.uniform(0.0, 3.141592653589793);
        if (static_cast<int>(exps.size()) != d) {
            exps.resize(static_cast<std::size_t>(d));
            for (double& e : exps) e = rng.uniform(-0.4, 0.8);
        }
        std::vector<ScalarField> comps;
        for (double a : exps) comps.push_back(make_power_weight(g, a));
        for (index_t c = 0; c < g.cell_count(); ++c) {
            std::vector<double> diag(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
                diag[static_cast<std::size_t>(i)] =
                    comps[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(c)];
            w.values[static_cast<std::size_t>(c)] = rotation_conjugated_diag(diag, angle, d);
        }
        return w;
    }
    }
    throw std::invalid_argument("weight spec: unhandled generator");
}

VectorField make_random_vector_field(const DyadicGrid& g, int d, std::uint64_t seed) {
    Rng rng(seed);
    VectorField f(g, d);
    for (index_t c = 0; c < g.cell_count(); ++c) {
        double sc = std::exp(0.5 * rng.normal());
        for (int i = 0; i < d; ++i) f.at(c)[i] = sc * rng.normal();
    }
    return f;
}

BodyField make_random_body_field(const DyadicGrid& g, int d, std::uint64_t seed, DirsPtr dirs) {
    if (!dirs) dirs = DirectionSet::canonical(d);
    Rng rng(seed);
    BodyField f(g, d, dirs);
    for (auto& body : f.values) {
        int gens = 2 + static_cast<int>(rng.index(4));
        std::vector<std::vector<double>> v(static_cast<std::size_t>(gens));
        for (auto& gv : v) {
            gv.resize(static_cast<std::size_t>(d));
            for (double& x : gv) x = rng.normal();
        }
        ConvexBody z = ConvexBody::zonotope(v, dirs);
        double fat = 0.1 + 0.4 * rng.uniform();
        body = minkowski_sum(z, scale(fat, ConvexBody::unit_ball(d, dirs)));
    }
    return f;
}

} // namespace weightlab
