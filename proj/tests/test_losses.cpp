#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tor/losses.hpp"
#include "tor/rng.hpp"

using namespace tor;

TEST_CASE("binary loss table values") {
  CHECK(binary_loss(LossKind::hinge, +1, 0.5) == Catch::Approx(0.5));
  CHECK(binary_loss(LossKind::logistic, +1, 0.0) == Catch::Approx(std::log(2.0)));
  CHECK(binary_loss(LossKind::laplacian, -1, 0.0) == Catch::Approx(1.0));
  CHECK(binary_loss(LossKind::square, +1, 3.0) == Catch::Approx(4.0));
  CHECK(binary_loss(LossKind::square_hinge, -1, 0.5) == Catch::Approx(2.25));
  CHECK(binary_loss(LossKind::hinge, +1, 2.0) == 0.0);
}

TEST_CASE("binary loss rejects bad input") {
  CHECK_THROWS_AS(binary_loss(LossKind::hinge, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(binary_loss(LossKind::hinge, 1, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(binary_loss(LossKind::square, 1, INFINITY), std::invalid_argument);
}

TEST_CASE("logistic loss is stable far from the margin") {
  CHECK(binary_loss(LossKind::logistic, +1, 1000.0) == Catch::Approx(0.0).margin(1e-300));
  CHECK(binary_loss(LossKind::logistic, +1, -1000.0) == Catch::Approx(1000.0));
  CHECK(std::isfinite(binary_loss(LossKind::logistic, -1, 700.0)));
}

TEST_CASE("ordinal loss at the Fig-4 thresholds") {
  Thresholds theta{{4, 8, 12, 16}};
  CHECK(ordinal_loss(LossKind::hinge, 3, 10.0, theta, 0.0) == 0.0);
  CHECK(ordinal_loss(LossKind::hinge, 3, 8.5, theta, 0.0) == Catch::Approx(0.5));
  Thresholds narrow{{-1, 1}};
  CHECK(ordinal_loss(LossKind::hinge, 1, 0.0, narrow, 0.0) == Catch::Approx(2.0));
}

TEST_CASE("hinge ordinal loss equals the explicit superposition") {
  Rng rng(31);
  for (int t = 0; t < 500; ++t) {
    const int K = static_cast<int>(rng.uniform_int(2, 6));
    std::vector<double> tv;
    for (int k = 1; k < K; ++k) tv.push_back(rng.uniform(-5, 5));
    std::sort(tv.begin(), tv.end());
    Thresholds theta{tv};
    const int y = static_cast<int>(rng.uniform_int(1, K));
    const double h = rng.uniform(-10, 10);
    const double b = rng.uniform(-2, 2);
    double direct = 0.0;
    for (int k = 1; k < K; ++k) {
      const double g = h - theta.values[k - 1] - b;
      direct += std::max(0.0, 1.0 - (y > k ? 1.0 : -1.0) * g);
    }
    CHECK(ordinal_loss(LossKind::hinge, y, h, theta, b) == direct);
  }
}

TEST_CASE("hinge ordinal loss vanishes inside the class band") {
  Rng rng(37);
  for (int t = 0; t < 500; ++t) {
    const int K = static_cast<int>(rng.uniform_int(2, 6));
    std::vector<double> tv;
    for (int k = 1; k < K; ++k) tv.push_back(rng.uniform(-8, 8));
    std::sort(tv.begin(), tv.end());
    Thresholds theta{tv};
    const int y = static_cast<int>(rng.uniform_int(1, K));
    const double lo = y == 1 ? -50.0 : theta.values[y - 2] + 1.0;
    const double hi = y == K ? 50.0 : theta.values[y - 1] - 1.0;
    if (lo > hi) continue;
    const double h = rng.uniform(lo, hi);
    CHECK(ordinal_loss(LossKind::hinge, y, h, theta, 0.0) == 0.0);
  }
}

TEST_CASE("swap gain hand example") {
  Thresholds theta{{-1, 1}};
  CHECK(swap_gain(LossKind::hinge, 1, 2, 0.0, -1.5, theta, 0.0) == Catch::Approx(-3.0));
  CHECK_THROWS_AS(swap_gain(LossKind::hinge, 1, 3, 0.0, 0.0, theta, 0.0), std::invalid_argument);
}

TEST_CASE("swap gain is antisymmetric under the mirror swap") {
  Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> tv{rng.uniform(-3, 0), rng.uniform(0, 3)};
    Thresholds theta{tv};
    const double h = rng.uniform(-4, 4);
    for (auto kind : {LossKind::hinge, LossKind::square, LossKind::logistic,
                      LossKind::square_hinge, LossKind::laplacian}) {
      const double fwd = swap_gain(kind, 1, 2, h, h, theta, 0.0);
      const double rev = swap_gain(kind, 1, 2, h, h, theta, 0.0);
      CHECK(fwd == rev);
      // swapping (y_i, y_j) at equal scores mirrors into minus the gain
      const double before = ordinal_loss(kind, 1, h, theta, 0.0) + ordinal_loss(kind, 2, h, theta, 0.0);
      const double after = ordinal_loss(kind, 2, h, theta, 0.0) + ordinal_loss(kind, 1, h, theta, 0.0);
      CHECK(fwd == Catch::Approx(after - before).margin(1e-12));
    }
  }
}

TEST_CASE("swap gain equals recomputing the full loss totals") {
  Rng rng(43);
  for (int t = 0; t < 200; ++t) {
    const int K = static_cast<int>(rng.uniform_int(2, 5));
    std::vector<double> tv;
    for (int k = 1; k < K; ++k) tv.push_back(rng.uniform(-4, 4));
    std::sort(tv.begin(), tv.end());
    Thresholds theta{tv};

    const int u = 12;
    std::vector<double> h(u);
    std::vector<int> y(u);
    for (int i = 0; i < u; ++i) {
      h[i] = rng.uniform(-6, 6);
      y[i] = static_cast<int>(rng.uniform_int(1, K));
    }
    const int yi = static_cast<int>(rng.uniform_int(1, K - 1));
    int i = -1, j = -1;
    for (int s = 0; s < u && (i < 0 || j < 0); ++s) {
      if (y[s] == yi && i < 0) i = s;
      if (y[s] == yi + 1 && j < 0) j = s;
    }
    if (i < 0 || j < 0) continue;

    for (auto kind : {LossKind::hinge, LossKind::square, LossKind::laplacian}) {
      auto total = [&](const std::vector<int>& labels) {
        double sum = 0.0;
        for (int s = 0; s < u; ++s) sum += ordinal_loss(kind, labels[s], h[s], theta, 0.0);
        return sum;
      };
      const double before = total(y);
      auto swapped = y;
      swapped[i] = yi + 1;
      swapped[j] = yi;
      const double gain = swap_gain(kind, yi, yi + 1, h[i], h[j], theta, 0.0);
      CHECK(total(swapped) - before == Catch::Approx(gain).margin(1e-10));
    }
  }
}

TEST_CASE("Def 3 holds for the whole loss family") {
  for (auto kind : {LossKind::hinge, LossKind::square_hinge, LossKind::logistic, LossKind::square,
                    LossKind::laplacian}) {
    auto report = check_def3(kind, 1000, 2024);
    INFO(loss_name(kind) << ": " << report.counterexample);
    CHECK(report.pass);
  }
}

TEST_CASE("Def 3 catches a broken loss") {
  auto report = check_def3_fn([](int, double a) { return a; }, 1000, 7);
  CHECK_FALSE(report.pass);
  CHECK_FALSE(report.counterexample.empty());
}

TEST_CASE("Def 1 via the prediction rule (Prop 4)") {
  Rng rng(53);
  for (auto kind : {LossKind::hinge, LossKind::square_hinge, LossKind::logistic, LossKind::square,
                    LossKind::laplacian}) {
    for (int t = 0; t < 10000; ++t) {
      const int K = static_cast<int>(rng.uniform_int(2, 6));
      std::vector<double> tv;
      for (int k = 1; k < K; ++k) tv.push_back(rng.uniform(-5, 5));
      std::sort(tv.begin(), tv.end());
      Thresholds theta{tv};
      const double b = rng.uniform(-1, 1);
      const int yi = static_cast<int>(rng.uniform_int(1, K - 1));
      const int yj = yi + 1;
      const double h = rng.uniform(-8, 8);
      const int f = predict_label(h, theta, b);
      const double li = ordinal_loss(kind, yi, h, theta, b);
      const double lj = ordinal_loss(kind, yj, h, theta, b);
      if (f < yj) {
        INFO(loss_name(kind) << " K=" << K << " yi=" << yi << " h=" << h << " f=" << f);
        CHECK(li < lj);
      }
      if (f > yi) {
        INFO(loss_name(kind) << " K=" << K << " yi=" << yi << " h=" << h << " f=" << f);
        CHECK(li > lj);
      }
    }
  }
}

TEST_CASE("prediction rule counts positive margins") {
  Thresholds theta{{4, 8, 12, 16}};
  CHECK(predict_label(10.0, theta, 0.0) == 3);
  CHECK(predict_label(3.0, theta, 0.0) == 1);
  CHECK(predict_label(100.0, theta, 0.0) == 5);
  CHECK(predict_label(4.0, theta, 0.0) == 1);  // exact tie stays in the lower class
}
