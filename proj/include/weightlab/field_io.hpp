#pragma once

#include "weightlab/convex_body.hpp"

#include <iosfwd>
#include <string>

namespace weightlab {

// Text field files: a header line
//   weightlab-field v1 dim=<n> depth=<L> kind=<scalar|vector|matrix|body> d=<d> [m=<m>]
// then one line per cell in row-major cell order. Scalar cells carry one
// float, vector cells d floats, matrix cells d*d floats (row-major). Body
// cells carry a kind tag and payload: "segment" + d floats, "ellipsoid" +
// d*d floats, "sampled" + m floats.
enum class FieldKind { scalar, vector, matrix, body };

FieldKind peek_field_kind(const std::string& path);

ScalarField read_scalar_field(const std::string& path);
VectorField read_vector_field(const std::string& path);
MatrixField read_matrix_field(const std::string& path);
BodyField read_body_field(const std::string& path);

void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const VectorField& f);
void write_field(const std::string& path, const MatrixField& f);
void write_field(const std::string& path, const BodyField& f);

std::string format_double(double v); // shortest exact round-trip text

} // namespace weightlab
