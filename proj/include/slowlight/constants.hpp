#pragma once

// 2019 SI exact values (c, hbar) and CODATA 2018 (eps0, amu).
namespace slowlight::constants {

inline constexpr double c0 = 299792458.0;         // vacuum light speed, m/s
inline constexpr double hbar = 1.054571817e-34;   // reduced Planck constant, J s
inline constexpr double eps0 = 8.8541878128e-12;  // vacuum permittivity, F/m
inline constexpr double amu = 1.66053906660e-27;  // atomic mass unit, kg

}  // namespace slowlight::constants
