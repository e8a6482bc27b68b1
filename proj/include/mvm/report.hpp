#pragma once

#include <string>

#include <json.hpp>

#include "mvm/ainfty.hpp"
#include "mvm/network.hpp"

// JSON fragments of the run report and SVG overlays. Doubles are written in their shortest
// round-trip form, so parse -> emit reproduces a document byte for byte.
namespace mvm::report {

using nlohmann::json;

json vec(const Vec2& x);
json generator(const Generator& g);
json hom(const HomSpace& h);
json network(const SpectralNetwork& n, const MultiSection& m);
json line(const JaggedLine& l);
json tree(const GradientTree& t);
json weights(const WeightSymbols& w);
json complex(const HomComplex& c, const WeightSymbols& w);
json cohomology(const Cohomology& c);
json m2(const StructureConstantTable& t, const WeightSymbols& w);
json functor(const FunctorCheck& f, const WeightSymbols& w);
json tangent_basis(const TangentBasis& b, const WeightSymbols& w);
json correspondence(const SectionCorrespondence& s);
json bside_tables();

// Canonical text form: two-space indent and a trailing newline.
std::string dump(const json& j);

// 1000 x 1000 viewbox, y up. One path per wall plus the outline; cuts are dashed polylines.
std::string svg_network(const SpectralNetwork& n, const MultiSection& m);
// One path per tree edge plus the outline; tree vertices are circles.
std::string svg_trees(const StructureConstantTable& t);

}  // namespace mvm::report
