#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sjm/distributions.hpp"
#include "sjm/error.hpp"

using namespace sjm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <class F>
Moments moments(int count, F draw) {
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < count; ++k) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double m = s / count;
    return {m, (s2 - count * m * m) / (count - 1)};
}

// Two-sample Kolmogorov-Smirnov statistic.
double ksStatistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return worst;
}

}  // namespace

TEST_CASE("identical seeds reproduce every family") {
    Rng a(99, 7), b(99, 7);
    for (int k = 0; k < 200; ++k) {
        REQUIRE(a.normal() == b.normal());
        REQUIRE(a.uniform() == b.uniform());
        REQUIRE(a.gamma(0.7) == b.gamma(0.7));
        REQUIRE(invGammaDraw(3.0, 2.0, a) == invGammaDraw(3.0, 2.0, b));
        REQUIRE(betaDraw(2.0, 5.0, a) == betaDraw(2.0, 5.0, b));
        REQUIRE(dirichletDraw(Vector::Constant(3, 1.5), a) == dirichletDraw(Vector::Constant(3, 1.5), b));
        REQUIRE(invWishartDraw(6.0, Matrix::Identity(3, 3), a) == invWishartDraw(6.0, Matrix::Identity(3, 3), b));
        const std::vector<double> w{0.1, -2.0, 1.0};
        REQUIRE(categoricalDraw(w, a) == categoricalDraw(w, b));
    }
    Rng c(99, 8);
    Rng d(99, 7);
    CHECK(c.normal() != d.normal());
}

TEST_CASE("uniform lies in the open unit interval") {
    Rng rng(1, 0);
    for (int k = 0; k < 100000; ++k) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("mvnDraw with a tiny covariance returns the mean") {
    Rng rng(2, 0);
    Vector mean(3);
    mean << 1.0, -2.0, 0.5;
    const Matrix chol = std::sqrt(1e-12) * Matrix::Identity(3, 3);
    const Vector x = mvnDraw(mean, chol, rng);
    CHECK((x - mean).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("mvnDraw standard normal mean") {
    Rng rng(3, 0);
    const int N = 100000;
    Vector sum = Vector::Zero(3);
    const Matrix I = Matrix::Identity(3, 3);
    for (int k = 0; k < N; ++k) sum += mvnDraw(Vector::Zero(3), I, rng);
    const Vector mean = sum / N;
    CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(N));
}

TEST_CASE("mvnDraw diagonal variances") {
    Rng rng(4, 0);
    Matrix cov(2, 2);
    cov << 4.0, 0.0, 0.0, 1.0;
    const Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();
    const int N = 100000;
    double s0 = 0, s1 = 0, q0 = 0, q1 = 0;
    for (int k = 0; k < N; ++k) {
        const Vector x = mvnDraw(Vector::Zero(2), chol, rng);
        s0 += x(0);
        s1 += x(1);
        q0 += x(0) * x(0);
        q1 += x(1) * x(1);
    }
    const double v0 = q0 / N - (s0 / N) * (s0 / N);
    const double v1 = q1 / N - (s1 / N) * (s1 / N);
    CHECK(std::abs(v0 / 4.0 - 1.0) < 0.05);
    CHECK(std::abs(v1 - 1.0) < 0.05);
}

TEST_CASE("mvnDraw rejects a non-positive diagonal") {
    Rng rng(5, 0);
    Matrix chol = Matrix::Identity(2, 2);
    chol(1, 1) = 0.0;
    CHECK_THROWS_AS(mvnDraw(Vector::Zero(2), chol, rng), InvalidInput);
    chol(1, 1) = -1.0;
    CHECK_THROWS_AS(mvnDraw(Vector::Zero(2), chol, rng), InvalidInput);
}

TEST_CASE("mvnDrawCov matches the covariance") {
    Rng rng(6, 0);
    Matrix cov(2, 2);
    cov << 2.0, 0.8, 0.8, 1.0;
    const int N = 100000;
    double sxy = 0.0;
    for (int k = 0; k < N; ++k) {
        const Vector x = mvnDrawCov(Vector::Zero(2), cov, rng);
        sxy += x(0) * x(1);
    }
    CHECK(std::abs(sxy / N - 0.8) < 0.03);
}

TEST_CASE("inverse gamma moments") {
    Rng rng(7, 0);
    const auto m1 = moments(100000, [&] { return invGammaDraw(3.0, 2.0, rng); });
    CHECK(std::abs(m1.mean - 1.0) < 0.03);
    const auto m2 = moments(100000, [&] { return invGammaDraw(10.0, 9.0, rng); });
    CHECK(std::abs(m2.mean - 1.0) < 0.03);
    for (int k = 0; k < 10000; ++k) REQUIRE(invGammaDraw(0.5, 0.01, rng) > 0.0);
    CHECK_THROWS_AS(invGammaDraw(0.0, 1.0, rng), InvalidInput);
    CHECK_THROWS_AS(invGammaDraw(1.0, -1.0, rng), InvalidInput);
}

TEST_CASE("inverse Wishart mean and positive definiteness") {
    Rng rng(8, 0);
    const int N = 10000;
    Matrix sum = Matrix::Zero(2, 2);
    for (int k = 0; k < N; ++k) {
        const Matrix W = invWishartDraw(10.0, Matrix::Identity(2, 2), rng);
        REQUIRE(W == W.transpose());
        REQUIRE(Eigen::LLT<Matrix>(W).info() == Eigen::Success);
        sum += W;
    }
    const Matrix mean = sum / N;
    CHECK(std::abs(mean(0, 0) * 7.0 - 1.0) < 0.1);
    CHECK(std::abs(mean(1, 1) * 7.0 - 1.0) < 0.1);
    CHECK(std::abs(mean(0, 1)) < 0.1 / 7.0);
    CHECK_THROWS_AS(invWishartDraw(0.5, Matrix::Identity(2, 2), rng), InvalidInput);
    Matrix notSpd = Matrix::Identity(2, 2);
    notSpd(0, 0) = -1.0;
    CHECK_THROWS_AS(invWishartDraw(5.0, notSpd, rng), InvalidInput);
}

TEST_CASE("one-dimensional inverse Wishart is an inverse gamma") {
    Rng a(9, 0), b(9, 1);
    const int N = 20000;
    std::vector<double> x, y;
    for (int k = 0; k < N; ++k) {
        x.push_back(invWishartDraw(6.0, Matrix::Constant(1, 1, 3.0), a)(0, 0));
        y.push_back(invGammaDraw(3.0, 1.5, b));
    }
    // 0.1% critical value of the two-sample KS statistic.
    CHECK(ksStatistic(x, y) < 1.95 * std::sqrt(2.0 / N));
}

TEST_CASE("Dirichlet and Beta draws") {
    Rng rng(10, 0);
    for (int k = 0; k < 1000; ++k) {
        const Vector p = dirichletDraw(Vector::Ones(3), rng);
        REQUIRE(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
        REQUIRE(p.minCoeff() >= 0.0);
    }
    Vector conc(3);
    conc << 4.0, 1.0, 2.0;
    Vector sum = Vector::Zero(3);
    for (int k = 0; k < 50000; ++k) sum += dirichletDraw(conc, rng);
    CHECK(((sum / 50000.0) - conc / conc.sum()).cwiseAbs().maxCoeff() < 0.01);
    const auto m = moments(50000, [&] { return betaDraw(2.0, 6.0, rng); });
    CHECK(std::abs(m.mean - 0.25) < 0.01);
    CHECK_THROWS_AS(dirichletDraw(Vector::Zero(3), rng), InvalidInput);
    CHECK_THROWS_AS(betaDraw(0.0, 1.0, rng), InvalidInput);
}

TEST_CASE("Bernoulli draws") {
    Rng rng(11, 0);
    int ones = 0;
    for (int k = 0; k < 100000; ++k) ones += bernoulliDraw(0.3, rng);
    CHECK(std::abs(ones / 1e5 - 0.3) < 4.0 * std::sqrt(0.21 / 1e5));
    CHECK_FALSE(bernoulliDraw(0.0, rng));
    CHECK(bernoulliDraw(1.0, rng));
    CHECK_THROWS_AS(bernoulliDraw(1.5, rng), InvalidInput);
}

TEST_CASE("categorical with a single finite weight") {
    Rng rng(12, 0);
    const std::vector<double> w{0.0, -kInf, -kInf};
    for (int k = 0; k < 1000; ++k) REQUIRE(categoricalDraw(w, rng) == 0);
}

TEST_CASE("categorical with equal weights") {
    Rng rng(13, 0);
    const int N = 100000;
    std::vector<int> counts(3, 0);
    const std::vector<double> w{-5.0, -5.0, -5.0};
    for (int k = 0; k < N; ++k) ++counts[static_cast<std::size_t>(categoricalDraw(w, rng))];
    const double sigma = std::sqrt(N * (1.0 / 3.0) * (2.0 / 3.0));
    for (int c : counts) CHECK(std::abs(c - N / 3.0) < 4.0 * sigma);
}

TEST_CASE("categorical rejects invalid weights") {
    Rng rng(14, 0);
    CHECK_THROWS_AS(categoricalDraw(std::vector<double>{-kInf, -kInf}, rng), InvalidInput);
    CHECK_THROWS_AS(categoricalDraw(std::vector<double>{0.0, std::nan("")}, rng), InvalidInput);
    CHECK_THROWS_AS(categoricalDraw(std::vector<double>{0.0, kInf}, rng), InvalidInput);
}

TEST_CASE("log-weight normalization is shift invariant") {
    const std::vector<double> w{-1.0, 2.5, 0.3, -kInf};
    const Vector base = normalizeLogWeights(w);
    CHECK(base.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(base(3) == 0.0);
    for (double shift : {-1e5, -700.0, 1.0, 800.0, 1e5}) {
        std::vector<double> s = w;
        for (double& x : s) x += shift;
        const Vector p = normalizeLogWeights(s);
        CHECK((p - base).cwiseAbs().maxCoeff() < 1e-12);
    }
    // Products of many likelihoods: weights far below exp underflow.
    const Vector tiny = normalizeLogWeights(std::vector<double>{-1e6, -1e6 + std::log(3.0)});
    CHECK(tiny(1) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("shifted categorical draws share a distribution") {
    const std::vector<double> w{0.0, 1.0, -0.5};
    std::vector<double> shifted = w;
    for (double& x : shifted) x += 1234.5;
    Rng a(15, 0), b(15, 1);
    const int N = 100000;
    std::vector<int> ca(3, 0), cb(3, 0);
    for (int k = 0; k < N; ++k) {
        ++ca[static_cast<std::size_t>(categoricalDraw(w, a))];
        ++cb[static_cast<std::size_t>(categoricalDraw(shifted, b))];
    }
    const Vector p = normalizeLogWeights(w);
    for (int k = 0; k < 3; ++k) {
        const double sd = std::sqrt(2.0 * N * p(k) * (1.0 - p(k)));
        CHECK(std::abs(ca[static_cast<std::size_t>(k)] - cb[static_cast<std::size_t>(k)]) < 4.0 * sd);
    }
}

TEST_CASE("categorical from probabilities") {
    Rng rng(16, 0);
    Vector p(3);
    p << 0.0, 1.0, 0.0;
    for (int k = 0; k < 100; ++k) REQUIRE(categoricalFromProbabilities(p, rng) == 1);
}
