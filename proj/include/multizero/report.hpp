#pragma once

#include <string>

#include "multizero/breadth_one.hpp"
#include "multizero/deflation.hpp"

namespace multizero {

inline constexpr const char* kToolVersion = "0.1.0";

// JSON reports.  Keys come out sorted and doubles use the shortest
// round-trip form, so identical inputs give byte-identical bytes.
std::string structure_json(const MultiplicityStructure& ms);
std::string deflation_json(const DeflationChain& chain, double theta_j,
                           double tol);
std::string breadth_one_json(const BreadthOneResult& r, double theta,
                             double tol);
std::string cluster_json(const std::vector<ClusterZero>& zeros,
                         const Point& center, double radius, int n_starts,
                         double tol, std::uint64_t seed);

// Human-readable counterparts.
std::string structure_text(const MultiplicityStructure& ms);
std::string deflation_text(const DeflationChain& chain);
std::string breadth_one_text(const BreadthOneResult& r);
std::string cluster_text(const std::vector<ClusterZero>& zeros);

// Renders a functional like "d00 + 0.5*d11 - d20".
std::string functional_string(const DualFunctional& d);

}  // namespace multizero
