#include <doctest.h>

#include <cmath>
#include <random>

#include "ipmc/error.hpp"
#include "ipmc/mlp.hpp"
#include "support.hpp"

using namespace ipmc;

namespace {

Eigen::MatrixXd random_rows(Eigen::Index n, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    }
    return m;
}

// Central differences of the residual, which is minus the normalized output.
Eigen::MatrixXd finite_difference_jacobian(MlpModel m, const Eigen::MatrixXd& rows, double h) {
    const Eigen::VectorXd theta = m.parameters();
    Eigen::MatrixXd J(rows.rows(), theta.size());
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
        Eigen::VectorXd t = theta;
        t(p) += h;
        m.set_parameters(t);
        const Eigen::VectorXd up = forward_normalized(m, rows);
        t(p) = theta(p) - h;
        m.set_parameters(t);
        const Eigen::VectorXd down = forward_normalized(m, rows);
        J.col(p) = -(up - down) / (2 * h);
    }
    return J;
}

double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double scale = std::max(std::abs(a(i, j)), std::abs(b(i, j)));
            const double diff = std::abs(a(i, j) - b(i, j));
            worst = std::max(worst, scale >= 1e-6 ? diff / scale : diff);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("default architecture parameter count") {
    const auto sizes = default_layer_sizes(60);
    CHECK(sizes.size() == 13);
    std::size_t expected = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) expected += (sizes[l - 1] + 1) * sizes[l];
    // 60*10+10, then ten 10x10 layers with biases, then 10+1
    CHECK(expected == 1721);
    const MlpModel m = init_model(sizes, Activation::Tanh, 1);
    CHECK(m.parameter_count() == expected);
    CHECK(m.parameters().size() == expected);
}

TEST_CASE("init is seeded and Glorot bounded") {
    const MlpModel a = init_model({8, 5, 1}, Activation::Tanh, 4);
    const MlpModel b = init_model({8, 5, 1}, Activation::Tanh, 4);
    const MlpModel c = init_model({8, 5, 1}, Activation::Tanh, 5);
    CHECK(a.parameters() == b.parameters());
    CHECK(a.parameters() != c.parameters());
    const double limit = std::sqrt(6.0 / 13.0);
    CHECK(a.layers[0].weights.cwiseAbs().maxCoeff() <= limit);
    CHECK(a.layers[0].biases.isZero());
    CHECK_THROWS_AS((void)init_model({3}, Activation::Tanh, 1), Error);
    CHECK_THROWS_AS((void)init_model({3, 2}, Activation::Tanh, 1), Error);
}

TEST_CASE("degenerate and hand-sized networks") {
    MlpModel bias_only = init_model({1, 1}, Activation::Tanh, 2);
    bias_only.layers[0].weights.setZero();
    bias_only.layers[0].biases(0) = 0.37;
    for (double x : {-3.0, 0.0, 11.0}) CHECK(forward(bias_only, std::vector<double>{x}) == 0.37);

    MlpModel zero = init_model({4, 3, 3, 1}, Activation::Tanh, 2);
    zero.set_parameters(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(zero.parameter_count())));
    CHECK(forward(zero, std::vector<double>{1, 2, 3, 4}) == 0.0);

    MlpModel dot = init_model({2, 1}, Activation::Linear, 1);
    dot.layers[0].weights << 1.0, 1.0;
    dot.layers[0].biases(0) = 0.0;
    CHECK(forward(dot, std::vector<double>{3, 4}) == 7.0);

    CHECK_THROWS_AS((void)forward(dot, std::vector<double>{std::nan(""), 1.0}), Error);
    CHECK_THROWS_AS((void)forward(dot, std::vector<double>{1.0}), Error);
}

TEST_CASE("batched forward equals row-wise forward") {
    for (auto act : {Activation::Tanh, Activation::Logistic, Activation::Linear}) {
        const MlpModel m = init_model({6, 5, 4, 1}, act, 17);
        const Eigen::MatrixXd rows = random_rows(9, 6, 3);
        const Eigen::VectorXd batch = forward_batch(m, rows);
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            const Eigen::VectorXd row = rows.row(i).transpose();
            CHECK(batch(i) == doctest::Approx(forward(m, {row.data(), 6})).epsilon(1e-15));
        }
    }
}

TEST_CASE("reverse-mode jacobian matches central differences") {
    for (auto act : {Activation::Tanh, Activation::Logistic}) {
        MlpModel m = init_model({5, 4, 3, 1}, act, 21);
        m.input_norm = AffineNormalizer::fit(random_rows(30, 5, 8));
        const Eigen::MatrixXd rows = random_rows(5, 5, 22);
        const Eigen::MatrixXd analytic = jacobian(m, rows);
        const Eigen::MatrixXd numeric = finite_difference_jacobian(m, rows, 1e-6);
        CHECK(analytic.rows() == 5);
        CHECK(analytic.cols() == static_cast<Eigen::Index>(m.parameter_count()));
        CHECK(max_relative_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("zero-weight net has a single nonzero jacobian column") {
    MlpModel m = init_model({4, 3, 3, 3, 1}, Activation::Tanh, 1);
    m.set_parameters(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.parameter_count())));
    const Eigen::MatrixXd J = jacobian(m, random_rows(6, 4, 2));
    const Eigen::Index bias = J.cols() - 1;
    for (Eigen::Index i = 0; i < J.rows(); ++i) {
        for (Eigen::Index p = 0; p < J.cols(); ++p) {
            CHECK(J(i, p) == (p == bias ? -1.0 : 0.0));
        }
    }
}

TEST_CASE("duplicated rows give duplicated jacobian rows") {
    const MlpModel m = init_model({3, 4, 1}, Activation::Tanh, 6);
    Eigen::MatrixXd rows = random_rows(3, 3, 1);
    rows.row(2) = rows.row(0);
    const Eigen::MatrixXd J = jacobian(m, rows);
    CHECK(J.row(2) == J.row(0));
}

TEST_CASE("normalizer fit and round trip") {
    const Eigen::MatrixXd rows = random_rows(40, 3, 5) * 7.0;
    const AffineNormalizer n = AffineNormalizer::fit(rows);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(n.normalize(rows.col(j).minCoeff(), j) == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(n.normalize(rows.col(j).maxCoeff(), j) == doctest::Approx(1.0).epsilon(1e-14));
        for (Eigen::Index i = 0; i < 40; ++i) {
            CHECK(std::abs(n.denormalize(n.normalize(rows(i, j), j), j) - rows(i, j)) <= 1e-12);
        }
    }
    const AffineNormalizer flat = AffineNormalizer::fit(Eigen::MatrixXd::Constant(5, 1, 2.5));
    CHECK(flat.normalize(2.5) == 0.0);
    CHECK(flat.scale(0) == 1.0);
}

TEST_CASE("normalization is fitted on training rows only") {
    const Signal x = test::random_signal(120, 30.0, 1).with_label("x");
    const Signal y = test::random_signal(120, 30.0, 2).with_label("y");
    auto d = split_dataset(frame_windows(x, y, {4, 1}), SplitRatios{}, 3);
    MlpModel m = init_model({4, 3, 1}, Activation::Tanh, 1);
    fit_normalization(m, d);
    const auto train = d.subset(d.rows_in(Split::Train));
    const AffineNormalizer expected = AffineNormalizer::fit(train.inputs);
    CHECK(m.input_norm.offset == expected.offset);
    CHECK(m.input_norm.scale == expected.scale);

    // changing a test row leaves the fit unchanged
    const auto test_row = static_cast<Eigen::Index>(d.rows_in(Split::Test).front());
    d.inputs.row(test_row).setConstant(1e6);
    MlpModel again = init_model({4, 3, 1}, Activation::Tanh, 1);
    fit_normalization(again, d);
    CHECK(again.input_norm.scale == m.input_norm.scale);
}

TEST_CASE("series prediction") {
    MlpModel m = init_model({60, 5, 1}, Activation::Tanh, 3);
    const Signal v = test::random_signal(100, 30.0, 4);
    const Signal p = predict_series(m, v, {60, 1});
    CHECK(p.size() == 41);
    CHECK(p.start_time() == doctest::Approx(59.0 / 30.0));
    CHECK(p.values() == predict_series(m, v, {60, 1}).values());

    m.set_parameters(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.parameter_count())));
    m.layers.back().biases(0) = 0.25;
    const Signal flat = predict_series(m, v, {60, 1});
    for (double value : flat.values()) CHECK(value == 0.25);

    CHECK_THROWS_AS((void)predict_series(m, test::random_signal(59, 30.0, 1), {60, 1}), Error);
}

TEST_CASE("parameter vector round trip") {
    MlpModel m = init_model({3, 2, 1}, Activation::Tanh, 9);
    const Eigen::VectorXd theta = m.parameters();
    // layer-major, weights row-major, then biases
    CHECK(theta(0) == m.layers[0].weights(0, 0));
    CHECK(theta(1) == m.layers[0].weights(0, 1));
    CHECK(theta(3) == m.layers[0].weights(1, 0));
    CHECK(theta(6) == m.layers[0].biases(0));
    CHECK(theta(8) == m.layers[1].weights(0, 0));
    MlpModel other = init_model({3, 2, 1}, Activation::Tanh, 10);
    other.set_parameters(theta);
    CHECK(other.parameters() == theta);
    CHECK_THROWS_AS(other.set_parameters(Eigen::VectorXd::Zero(3)), Error);
}
