#include "weightlab/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace weightlab {

std::string format_double(double v) {
    // shortest representation that round-trips exactly
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    return buf;
}

namespace {

struct Header {
    int dim = 1;
    int depth = 0;
    FieldKind kind = FieldKind::scalar;
    int d = 1;
    int m = 0;
};

Header parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("field file " + path + ": empty");
    std::istringstream ss(line);
    std::string magic, version, tok;
    ss >> magic >> version;
    if (magic != "weightlab-field" || version != "v1")
        throw std::runtime_error("field file " + path + ": bad header");
    Header h;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("field file " + path + ": bad header token " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "dim") h.dim = std::stoi(val);
        else if (key == "depth") h.depth = std::stoi(val);
        else if (key == "d") h.d = std::stoi(val);
        else if (key == "m") h.m = std::stoi(val);
        else if (key == "kind") {
            if (val == "scalar") h.kind = FieldKind::scalar;
            else if (val == "vector") h.kind = FieldKind::vector;
            else if (val == "matrix") h.kind = FieldKind::matrix;
            else if (val == "body") h.kind = FieldKind::body;
            else throw std::runtime_error("field file " + path + ": unknown kind " + val);
        } else {
            throw std::runtime_error("field file " + path + ": unknown header key " + key);
        }
    }
    return h;
}

std::vector<double> parse_floats(const std::string& line, std::size_t expect, const std::string& path) {
    std::istringstream ss(line);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (out.size() != expect)
        throw std::runtime_error("field file " + path + ": expected " + std::to_string(expect) +
                                 " values per line, got " + std::to_string(out.size()));
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

void write_header(std::ostream& out, int dim, int depth, const char* kind, int d, int m = 0) {
    out << "weightlab-field v1 dim=" << dim << " depth=" << depth << " kind=" << kind
        << " d=" << d;
    if (m > 0) out << " m=" << m;
    out << "\n";
}

} // namespace

FieldKind peek_field_kind(const std::string& path) {
    auto in = open_in(path);
    return parse_header(in, path).kind;
}

ScalarField read_scalar_field(const std::string& path) {
    auto in = open_in(path);
    Header h = parse_header(in, path);
    if (h.kind != FieldKind::scalar)
        throw std::runtime_error("field file " + path + ": not a scalar field");
    ScalarField f{DyadicGrid(h.dim, h.depth)};
    std::string line;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        if (!std::getline(in, line))
            throw std::runtime_error("field file " + path + ": truncated");
        f.values[static_cast<std::size_t>(c)] = parse_floats(line, 1, path)[0];
    }
    return f;
}

VectorField read_vector_field(const std::string& path) {
    auto in = open_in(path);
    Header h = parse_header(in, path);
    if (h.kind != FieldKind::vector)
        throw std::runtime_error("field file " + path + ": not a vector field");
    VectorField f{DyadicGrid(h.dim, h.depth), h.d};
    std::string line;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        if (!std::getline(in, line))
            throw std::runtime_error("field file " + path + ": truncated");
        auto vals = parse_floats(line, static_cast<std::size_t>(h.d), path);
        for (int i = 0; i < h.d; ++i) f.at(c)[i] = vals[static_cast<std::size_t>(i)];
    }
    return f;
}

MatrixField read_matrix_field(const std::string& path) {
    auto in = open_in(path);
    Header h = parse_header(in, path);
    if (h.kind != FieldKind::matrix)
        throw std::runtime_error("field file " + path + ": not a matrix field");
    MatrixField f{DyadicGrid(h.dim, h.depth), h.d};
    std::string line;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        if (!std::getline(in, line))
            throw std::runtime_error("field file " + path + ": truncated");
        auto vals = parse_floats(line, static_cast<std::size_t>(h.d) * h.d, path);
        f.values[static_cast<std::size_t>(c)] = SpdMatrix(h.d, vals.data());
    }
    return f;
}

BodyField read_body_field(const std::string& path) {
    auto in = open_in(path);
    Header h = parse_header(in, path);
    if (h.kind != FieldKind::body)
        throw std::runtime_error("field file " + path + ": not a body field");
    DirsPtr dirs;
    if (h.m > 0 && h.m != DirectionSet::canonical(h.d)->count())
        dirs = std::make_shared<DirectionSet>(h.d, h.m);
    else
        dirs = DirectionSet::canonical(h.d);
    BodyField f{DyadicGrid(h.dim, h.depth), h.d, dirs};
    std::string line;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        if (!std::getline(in, line))
            throw std::runtime_error("field file " + path + ": truncated");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        std::string rest;
        std::getline(ss, rest);
        if (tag == "segment") {
            auto vals = parse_floats(rest, static_cast<std::size_t>(h.d), path);
            f.values[static_cast<std::size_t>(c)] = ConvexBody::segment(std::move(vals), dirs);
        } else if (tag == "ellipsoid") {
            auto vals = parse_floats(rest, static_cast<std::size_t>(h.d) * h.d, path);
            f.values[static_cast<std::size_t>(c)] = ConvexBody::ellipsoid(SpdMatrix(h.d, vals.data()), dirs);
        } else if (tag == "sampled") {
            auto vals = parse_floats(rest, static_cast<std::size_t>(dirs->count()), path);
            f.values[static_cast<std::size_t>(c)] = ConvexBody::sampled(std::move(vals), dirs);
        } else {
            throw std::runtime_error("field file " + path + ": unknown body kind " + tag);
        }
    }
    return f;
}

void write_field(const std::string& path, const ScalarField& f) {
    auto out = open_out(path);
    write_header(out, f.grid.dim, f.grid.depth, "scalar", 1);
    for (double v : f.values) out << format_double(v) << "\n";
}

void write_field(const std::string& path, const VectorField& f) {
    auto out = open_out(path);
    write_header(out, f.grid.dim, f.grid.depth, "vector", f.d);
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        for (int i = 0; i < f.d; ++i) out << (i ? " " : "") << format_double(f.at(c)[i]);
        out << "\n";
    }
}

void write_field(const std::string& path, const MatrixField& f) {
    auto out = open_out(path);
    write_header(out, f.grid.dim, f.grid.depth, "matrix", f.d);
    for (const SpdMatrix& m : f.values) {
        for (int i = 0; i < f.d * f.d; ++i) out << (i ? " " : "") << format_double(m.data()[i]);
        out << "\n";
    }
}

void write_field(const std::string& path, const BodyField& f) {
    auto out = open_out(path);
    int m = f.values.empty() ? 0 : f.values.front().dirs()->count();
    write_header(out, f.grid.dim, f.grid.depth, "body", f.d, m);
    for (const ConvexBody& b : f.values) {
        switch (b.kind()) {
        case BodyKind::segment:
            out << "segment";
            for (int i = 0; i < f.d; ++i) out << " " << format_double(b.segment_vector()[static_cast<std::size_t>(i)]);
            break;
        case BodyKind::ellipsoid:
            out << "ellipsoid";
            for (int i = 0; i < f.d * f.d; ++i) out << " " << format_double(b.ellipsoid_matrix().data()[i]);
            break;
        case BodyKind::sampled:
            out << "sampled";
            for (int j = 0; j < m; ++j) out << " " << format_double(b.support_sample(j));
            break;
        }
        out << "\n";
    }
}

} // namespace weightlab
