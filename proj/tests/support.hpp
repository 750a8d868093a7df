#pragma once

#include <random>
#include <vector>

#include "ymh/currents.hpp"
#include "ymh/lattice.hpp"

namespace ymh::testing {

LatticeHandle grid2(int N, double L = 1.0, int flux = 0);
LatticeHandle grid3(int N, double L = 1.0, std::array<int, 3> flux = {0, 0, 0});

FormField random_form(const Grid& g, int degree, std::mt19937_64& rng, double scale = 1.0);

// Smooth random data: a few low Fourier modes per component.
FormField smooth_form(const Grid& g, int degree, std::mt19937_64& rng, double scale = 1.0, int modes = 2);

// |u| <= 1 with random phases; alpha random of the given size.
PairState random_pair(LatticeHandle lat, double eps, std::mt19937_64& rng, double alpha_scale = 1.0);

double rel_diff(double a, double b);

// Flat distance of a 0-chain to zero by exhaustive matching: every unit
// point is either deleted (cost 1) or paired with a point of opposite sign
// (cost = periodic l1 path length).
double flat0_bruteforce(const CubicalCurrent& R);

// Random 0-chain with total mass at most max_mass.
CubicalCurrent random_points(LatticeHandle lat, std::mt19937_64& rng, int max_mass);
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ymh::testing
