#include "popt/detection.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

namespace popt {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

void require_labels_match(const CorrelationTable& table, const InputSet& in_a,
                          const InputSet& in_b) {
    require(table.nx() == static_cast<int>(in_a.states.size()) &&
                table.ny() == static_cast<int>(in_b.states.size()),
            "detect: table axes do not match the input sets");
    for (int x = 0; x < table.nx(); ++x)
        require(table.x_labels()[static_cast<std::size_t>(x)] ==
                    in_a.states[static_cast<std::size_t>(x)].label,
                "detect: x label mismatch");
    for (int y = 0; y < table.ny(); ++y)
        require(table.y_labels()[static_cast<std::size_t>(y)] ==
                    in_b.states[static_cast<std::size_t>(y)].label,
                "detect: y label mismatch");
}

struct Fnv1a {
    std::uint64_t state = 14695981039346656037ULL;
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= p[i];
            state *= 1099511628211ULL;
        }
    }
    void str(const std::string& s) { bytes(s.data(), s.size()); }
    void real(double d) {
        const auto u = std::bit_cast<std::uint64_t>(d);
        bytes(&u, sizeof(u));
    }
};

std::string hash_table_and_inputs(const CorrelationTable& table, const InputSet& in_a,
                                  const InputSet& in_b) {
    Fnv1a h;
    auto add_inputs = [&h](const InputSet& in) {
        for (const auto& s : in.states) {
            h.str(s.label);
            const ComplexMatrix& m = s.op.matrix();
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    h.real(m(i, j).real());
                    h.real(m(i, j).imag());
                }
        }
    };
    add_inputs(in_a);
    add_inputs(in_b);
    for (const auto& l : table.a_labels()) h.str(l);
    for (const auto& l : table.b_labels()) h.str(l);
    for (double v : table.values()) h.real(v);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h.state));
    return std::string(buf);
}

// Least-squares solve over the product-operator dictionary; returns the
// coefficient vector and residual for target y.
struct LstSq {
    RealVector coeffs;
    double residual = 0.0;
};

LstSq dictionary_lstsq(const std::vector<ComplexMatrix>& dictionary, const ComplexMatrix& target) {
    const int n = static_cast<int>(target.rows());
    const int m = static_cast<int>(dictionary.size());
    RealMatrix b(n * n, m);
    for (int k = 0; k < m; ++k)
        b.col(k) = hermitian_to_real_vec(dictionary[static_cast<std::size_t>(k)]);
    const RealVector y = hermitian_to_real_vec(target);
    Eigen::JacobiSVD<RealMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    RealVector c = svd.matrixU().transpose() * y;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        c(i) = sv(i) > kRankCutoff * top ? c(i) / sv(i) : 0.0;
    LstSq out;
    out.coeffs = svd.matrixV() * c;
    out.residual = (b * out.coeffs - y).norm();
    return out;
}

}  // namespace

double scaled_threshold(int d_a, int d_b, std::uint64_t shots) {
    const double dims = std::pow(static_cast<double>(d_a) * d_b, 2.0);
    return 3.0 * std::sqrt(std::log(dims) / static_cast<double>(shots));
}

DetectionReport detect(const CorrelationTable& table, const InputSet& in_a,
                       const InputSet& in_b, double threshold, const SolverOptions& options) {
    require_labels_match(table, in_a, in_b);
    const int dim = in_a.dim * in_b.dim;
    const int m = table.nx() * table.ny();

    SolverOptions opts = options;
    if (table.shots()) {
        // Finite statistics push the rhs off the consistent subspace; widen
        // the feasibility allowance to the shot-noise scale.
        const double noise =
            10.0 * std::sqrt(static_cast<double>(m) / static_cast<double>(*table.shots()));
        opts.eps_feasibility = std::max(opts.eps_feasibility, noise);
    }

    std::vector<Constraint> base;
    base.reserve(static_cast<std::size_t>(m));
    for (int x = 0; x < table.nx(); ++x)
        for (int y = 0; y < table.ny(); ++y)
            base.push_back(Constraint{
                HermitianOperator(tensor_product(
                    in_a.states[static_cast<std::size_t>(x)].op.matrix(),
                    in_b.states[static_cast<std::size_t>(y)].op.matrix())),
                0.0});

    DetectionReport report;
    report.threshold = threshold;
    report.max_c = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < table.na(); ++a)
        for (int b = 0; b < table.nb(); ++b) {
            DetectionProblem problem;
            problem.dim = dim;
            problem.options = opts;
            problem.constraints = base;
            int k = 0;
            for (int x = 0; x < table.nx(); ++x)
                for (int y = 0; y < table.ny(); ++y)
                    problem.constraints[static_cast<std::size_t>(k++)].rhs =
                        table.at(a, b, x, y);
            const SDPSolution sol = solve_detection(problem);
            CellResult cell;
            cell.a = table.a_labels()[static_cast<std::size_t>(a)];
            cell.b = table.b_labels()[static_cast<std::size_t>(b)];
            cell.c = sol.c;
            cell.status = sol.status;
            cell.method = sol.method;
            cell.iterations = sol.iterations;
            cell.residual_primal = sol.residual_primal;
            cell.residual_dual = sol.residual_dual;
            cell.data_residual = sol.data_residual;
            if (sol.c > report.max_c) {
                report.max_c = sol.c;
                report.worst_a = cell.a;
                report.worst_b = cell.b;
            }
            report.cells.push_back(std::move(cell));
        }
    report.beyond_quantum = report.max_c > threshold;
    report.table_hash = hash_table_and_inputs(table, in_a, in_b);
    return report;
}

HermitianOperator reconstruct(const CorrelationTable& table, const InputSet& in_a,
                              const InputSet& in_b, int a, int b) {
    require_labels_match(table, in_a, in_b);
    require(a >= 0 && a < table.na() && b >= 0 && b < table.nb(), "reconstruct: bad outcome");
    require(is_tomo_complete(in_a, in_b), "reconstruct: input sets not tomographically complete");
    DetectionProblem problem;
    problem.dim = in_a.dim * in_b.dim;
    problem.options.shortcut_allowed = true;
    problem.options.eps_feasibility = std::numeric_limits<double>::infinity();
    for (int x = 0; x < table.nx(); ++x)
        for (int y = 0; y < table.ny(); ++y)
            problem.constraints.push_back(Constraint{
                HermitianOperator(tensor_product(
                    in_a.states[static_cast<std::size_t>(x)].op.matrix(),
                    in_b.states[static_cast<std::size_t>(y)].op.matrix())),
                table.at(a, b, x, y)});
    const SDPSolution sol = solve_detection(problem);
    return HermitianOperator(sol.x_plus.matrix() - sol.x_minus.matrix());
}

HermitianOperator bq_witness(const BipartiteState& rho) {
    const Eigh e = eigh(rho.op);
    ComplexMatrix y = ComplexMatrix::Zero(rho.op.dim(), rho.op.dim());
    bool any = false;
    for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i)
        if (e.eigenvalues(i) < -1e-10) {
            const ComplexVector v = e.eigenvectors.col(i);
            y += v * v.adjoint();
            any = true;
        }
    require(any, "bq_witness: state has no negative eigenvalue");
    return HermitianOperator(y);
}

WitnessCoefficients project_witness(const HermitianOperator& y, const InputSet& in_a,
                                    const InputSet& in_b) {
    require(y.dim() == in_a.dim * in_b.dim, "project_witness: dimension mismatch");
    const int nx = static_cast<int>(in_a.states.size());
    const int ny = static_cast<int>(in_b.states.size());
    std::vector<ComplexMatrix> dict;
    dict.reserve(static_cast<std::size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
        for (int yy = 0; yy < ny; ++yy) {
            const ComplexMatrix ta =
                in_a.states[static_cast<std::size_t>(x)].op.matrix().transpose();
            const ComplexMatrix tb =
                in_b.states[static_cast<std::size_t>(yy)].op.matrix().transpose();
            dict.push_back(tensor_product(ta, tb));
        }
    const LstSq ls = dictionary_lstsq(dict, y.matrix());
    WitnessCoefficients out;
    out.alpha.resize(nx, ny);
    for (int x = 0; x < nx; ++x)
        for (int yy = 0; yy < ny; ++yy) out.alpha(x, yy) = ls.coeffs(x * ny + yy);
    out.residual = ls.residual;
    return out;
}

double product_span_residual(const HermitianOperator& op, const InputSet& in_a,
                             const InputSet& in_b) {
    require(op.dim() == in_a.dim * in_b.dim, "product_span_residual: dimension mismatch");
    std::vector<ComplexMatrix> dict;
    dict.reserve(in_a.states.size() * in_b.states.size());
    for (const auto& ta : in_a.states)
        for (const auto& tb : in_b.states)
            dict.push_back(tensor_product(ta.op.matrix(), tb.op.matrix()));
    return dictionary_lstsq(dict, op.matrix()).residual;
}

WitnessCoefficients witness_expand(const HermitianOperator& y, const InputSet& in_a,
                                   const InputSet& in_b) {
    WitnessCoefficients out = project_witness(y, in_a, in_b);
    if (out.residual > kWitnessExpandTol)
        throw NotExpandableError(out.residual,
                                 "witness_expand: operator lies outside the input-product span");
    return out;
}

MDIWitnessSpec make_mdi_witness(const WitnessCoefficients& coeffs, const InputSet& in_a,
                                const InputSet& in_b, std::string a0, std::string b0) {
    require(coeffs.alpha.rows() == static_cast<Eigen::Index>(in_a.states.size()) &&
                coeffs.alpha.cols() == static_cast<Eigen::Index>(in_b.states.size()),
            "make_mdi_witness: coefficient shape mismatch");
    return MDIWitnessSpec{coeffs.alpha, std::move(a0), std::move(b0)};
}

double mdi_witness_value(const CorrelationTable& table, const MDIWitnessSpec& spec) {
    require(spec.beta.rows() == table.nx() && spec.beta.cols() == table.ny(),
            "mdi_witness_value: coefficient shape mismatch");
    int a0 = -1, b0 = -1;
    for (int a = 0; a < table.na(); ++a)
        if (table.a_labels()[static_cast<std::size_t>(a)] == spec.a0) a0 = a;
    for (int b = 0; b < table.nb(); ++b)
        if (table.b_labels()[static_cast<std::size_t>(b)] == spec.b0) b0 = b;
    require(a0 >= 0 && b0 >= 0, "mdi_witness_value: selected outcomes not present in table");
    double v = 0.0;
    for (int x = 0; x < table.nx(); ++x)
        for (int y = 0; y < table.ny(); ++y) v += spec.beta(x, y) * table.at(a0, b0, x, y);
    return v;
}

}  // namespace popt
