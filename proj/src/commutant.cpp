#include "ciconia/commutant.hpp"

#include "ciconia/errors.hpp"
#include "ciconia/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace ciconia {

const char* to_string(Group g)
{
    return g == Group::SO ? "SO" : "O";
}

Group parse_group(std::string_view s)
{
    std::string l(s);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (l == "so") return Group::SO;
    if (l == "o") return Group::O;
    throw ConfigError("unknown group '" + std::string(s) + "' (expected so or o)");
}

std::vector<Eigen::MatrixXd> random_elements(int m, Group group, std::size_t count, std::uint64_t seed)
{
    SplitMix rng(seed);
    std::vector<Eigen::MatrixXd> out;
    const std::size_t rotations = group == Group::O && count > 0 ? count - 1 : count;
    for (std::size_t k = 0; k < rotations; ++k) {
        Eigen::MatrixXd X(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
        const Eigen::MatrixXd A = X - X.transpose();
        out.push_back(A.exp());
    }
    if (group == Group::O && count > 0) {
        // A reflection in a random hyperplane.
        Eigen::VectorXd n(m);
        for (int i = 0; i < m; ++i) n(i) = rng.normal();
        n.normalize();
        out.push_back(Eigen::MatrixXd::Identity(m, m) - 2.0 * n * n.transpose());
    }
    return out;
}

CommutantProblem make_problem(int m, Group group, std::uint64_t seed, std::size_t count)
{
    return {m, group, random_elements(m, group, count, seed)};
}

namespace {

// Frobenius-orthonormal basis of symmetric n x n matrices.
std::vector<Eigen::MatrixXd> symmetric_basis(int n)
{
    std::vector<Eigen::MatrixXd> b;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
            if (i == j) {
                E(i, i) = 1.0;
            } else {
                E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
            }
            b.push_back(E);
        }
    return b;
}

Eigen::MatrixXd diagonal_action(const Eigen::MatrixXd& g)
{
    const auto m = g.rows();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    D.topLeftCorner(m, m) = g;
    D.bottomRightCorner(m, m) = g;
    return D;
}

struct NullSpace {
    std::vector<Eigen::MatrixXd> basis;
    std::vector<double> sv;
};

NullSpace null_space(int m, const std::vector<Eigen::MatrixXd>& gens, double null_tol)
{
    const int n = 2 * m;
    const auto P = symmetric_basis(n);
    const auto cols = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd M(static_cast<Eigen::Index>(gens.size()) * n * n, cols);
    for (std::size_t g = 0; g < gens.size(); ++g) {
        const Eigen::MatrixXd D = diagonal_action(gens[g]);
        for (Eigen::Index k = 0; k < cols; ++k) {
            const Eigen::MatrixXd C = P[k] * D - D * P[k];
            M.block(static_cast<Eigen::Index>(g) * n * n, k, n * n, 1) = C.reshaped();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    NullSpace ns;
    ns.sv.assign(s.data(), s.data() + s.size());
    const double smax = s.size() ? s(0) : 0.0;
    const Eigen::MatrixXd& V = svd.matrixV();
    for (Eigen::Index i = 0; i < cols; ++i) {
        const double si = i < s.size() ? s(i) : 0.0;
        if (si > null_tol * smax) continue;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index k = 0; k < cols; ++k) A += V(k, i) * P[k];
        ns.basis.push_back(A);
    }
    return ns;
}

} // namespace

CommutantBasis solve_commutant(const CommutantProblem& p, double null_tol)
{
    if (p.m < 2) throw ConfigError("commutant needs m >= 2");
    if (p.generators.size() < 3) throw ConfigError("commutant needs at least 3 generators");
    for (const auto& g : p.generators) {
        if (g.rows() != p.m || g.cols() != p.m) throw ConfigError("generator has the wrong size");
        const double orth = (g.transpose() * g - Eigen::MatrixXd::Identity(p.m, p.m)).cwiseAbs().maxCoeff();
        if (orth > 1e-12) throw ConfigError("generator is not orthogonal (|g^T g - 1| = " + std::to_string(orth) + ")");
        if (p.group == Group::SO && g.determinant() < 0.0) throw ConfigError("SO generator has determinant -1");
    }

    const NullSpace full = null_space(p.m, p.generators, null_tol);
    // Drop the last rotation (a reflection is never redundant for O(m)).
    std::vector<Eigen::MatrixXd> fewer = p.generators;
    for (auto it = fewer.rbegin(); it != fewer.rend(); ++it)
        if (it->determinant() > 0.0) {
            fewer.erase(std::next(it).base());
            break;
        }
    const NullSpace less = null_space(p.m, fewer, null_tol);
    if (less.basis.size() != full.basis.size()) {
        throw RankDeficientGenerators("dimension changes from " + std::to_string(less.basis.size()) + " to " +
                                      std::to_string(full.basis.size()) +
                                      " with the last rotation; retry with more generators");
    }
    CommutantBasis b;
    b.m = p.m;
    b.group = p.group;
    b.basis = full.basis;
    b.singular_values = full.sv;
    return b;
}

double commutation_residual(const CommutantBasis& b, const std::vector<Eigen::MatrixXd>& elements)
{
    double worst = 0.0;
    for (const auto& g : elements) {
        const Eigen::MatrixXd D = diagonal_action(g);
        for (const auto& A : b.basis) worst = std::max(worst, (A * D - D * A).cwiseAbs().maxCoeff());
    }
    return worst;
}

StructureReport structure_check(const CommutantBasis& b, double tol)
{
    const int m = b.m;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    std::vector<Eigen::MatrixXd> family{I / std::sqrt(double(m))};
    if (m == 2 && b.group == Group::SO) {
        Eigen::MatrixXd R(2, 2);
        R << 0, -1, 1, 0;
        family.push_back(R / std::sqrt(2.0));
    }

    StructureReport r;
    r.dimension = b.dimension();
    r.predicted_dimension = 2 + static_cast<int>(family.size());
    for (const auto& A : b.basis) {
        const Eigen::MatrixXd F = A.topLeftCorner(m, m);
        const Eigen::MatrixXd H = A.bottomRightCorner(m, m);
        const Eigen::MatrixXd B = A.topRightCorner(m, m);
        r.diagonal_deviation = std::max({r.diagonal_deviation, (F - F.trace() / m * I).cwiseAbs().maxCoeff(),
                                         (H - H.trace() / m * I).cwiseAbs().maxCoeff()});
        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m, m);
        for (const auto& E : family) proj += (E.cwiseProduct(B)).sum() * E;
        r.off_diagonal_deviation = std::max(r.off_diagonal_deviation, (B - proj).cwiseAbs().maxCoeff());
    }

    // Every predicted element must lie in the span of the basis.
    std::vector<Eigen::MatrixXd> predicted;
    const int n = 2 * m;
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    E.topLeftCorner(m, m) = I;
    predicted.push_back(E);
    E.setZero();
    E.bottomRightCorner(m, m) = I;
    predicted.push_back(E);
    for (const auto& a : family) {
        E.setZero();
        E.topRightCorner(m, m) = a;
        E.bottomLeftCorner(m, m) = a.transpose();
        predicted.push_back(E);
    }
    for (auto& P : predicted) {
        P /= P.norm();
        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(n, n);
        for (const auto& A : b.basis) proj += (A.cwiseProduct(P)).sum() * A;
        r.span_deficit = std::max(r.span_deficit, (P - proj).cwiseAbs().maxCoeff());
    }
    r.ok = r.dimension == r.predicted_dimension && r.diagonal_deviation < tol && r.off_diagonal_deviation < tol &&
           r.span_deficit < tol;
    return r;
}

} // namespace ciconia
