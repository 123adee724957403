#pragma once

// Symmetric maps on R^m (+) R^m commuting with the diagonal action g -> diag(g, g)
// of SO(m) or O(m), found as a numerical null space.

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>
#include <vector>

namespace ciconia {

enum class Group { SO, O };
const char* to_string(Group g);
/// "so" / "o", case-insensitive; throws ConfigError.
Group parse_group(std::string_view s);

struct CommutantProblem {
    int m = 2;
    Group group = Group::SO;
    std::vector<Eigen::MatrixXd> generators; // m x m orthogonal
};

/// Exponentials of random antisymmetric matrices, plus one reflection for O(m).
std::vector<Eigen::MatrixXd> random_elements(int m, Group group, std::size_t count, std::uint64_t seed);

/// `count` generators as above (count includes the reflection for O).
CommutantProblem make_problem(int m, Group group, std::uint64_t seed, std::size_t count = 6);

struct CommutantBasis {
    int m = 0;
    Group group = Group::SO;
    std::vector<Eigen::MatrixXd> basis; // symmetric 2m x 2m, Frobenius-orthonormal
    std::vector<double> singular_values; // of the constraint system, descending
    int dimension() const { return static_cast<int>(basis.size()); }
};

/// Null space of { A D_g - D_g A = 0 for all generators, A = A^T }, with singular
/// values below null_tol * sigma_max counted as null. Throws ConfigError for bad
/// input and RankDeficientGenerators if dropping the last rotation changes the dimension.
CommutantBasis solve_commutant(const CommutantProblem& p, double null_tol = 1e-8);

/// max over basis and elements of |A D_g - D_g A|.
double commutation_residual(const CommutantBasis& b, const std::vector<Eigen::MatrixXd>& elements);

struct StructureReport {
    int dimension = 0;
    int predicted_dimension = 0; // 2 + dimension of the off-diagonal family
    double diagonal_deviation = 0.0; // diagonal blocks vs multiples of 1_m
    double off_diagonal_deviation = 0.0; // off-diagonal block vs span{1} or span{1, rot90}
    double span_deficit = 0.0; // how far the basis is from containing the predicted family
    bool ok = false;
};

/// Checks the block shape (f 1, a; a^T, h 1) with a = b 1 (+ c rot90 when m = 2 and SO).
StructureReport structure_check(const CommutantBasis& b, double tol = 1e-10);

} // namespace ciconia
