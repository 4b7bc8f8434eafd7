#include "h2wkit/model_io.hpp"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace h2wkit {
namespace {

using testing::error_code_of;
using testing::for_each_seed;
using testing::Gen;

constexpr const char* kLag = R"(h2wkit-model v1
# first-order lag
name lag
dims 1 1 1
matrix A
-1
matrix B
1
matrix C
1
matrix D
0
)";

TEST(LoadModelTest, Minimal) {
  const auto nm = load_model_string(kLag);
  EXPECT_EQ(nm.name, "lag");
  EXPECT_EQ(nm.model.order(), 1u);
  EXPECT_EQ(nm.model.A()(0, 0), -1.0);
  EXPECT_TRUE(nm.model.strictly_proper());
}

TEST(LoadModelTest, BlocksInAnyOrderAndCrlf) {
  const std::string doc =
      "h2wkit-model v1\r\ndims 2 1 1\r\nmatrix D\r\n0.5\r\nmatrix C\r\n1 2\r\n"
      "matrix B\r\n3\r\n4\r\nmatrix A\r\n-1 0   # trailing comment\r\n0 -2\r\n";
  const auto nm = load_model_string(doc);
  EXPECT_EQ(nm.name, "unnamed");
  EXPECT_EQ(nm.model.D()(0, 0), 0.5);
  EXPECT_EQ(nm.model.A()(1, 1), -2.0);
  EXPECT_EQ(nm.model.B()(1, 0), 4.0);
}

TEST(LoadModelTest, WrongRowCountIsDimensionMismatch) {
  const std::string doc =
      "h2wkit-model v1\ndims 2 1 1\nmatrix A\n-1 0\n0 -2\nmatrix B\n1\n"
      "matrix C\n1 1\nmatrix D\n0\n";
  EXPECT_EQ(error_code_of([&] { load_model_string(doc); }), ErrorCode::kDimensionMismatch);
  const std::string wide =
      "h2wkit-model v1\ndims 1 1 1\nmatrix A\n-1 3\nmatrix B\n1\nmatrix C\n1\nmatrix D\n0\n";
  EXPECT_EQ(error_code_of([&] { load_model_string(wide); }), ErrorCode::kDimensionMismatch);
}

TEST(LoadModelTest, ParseErrorsCarryLineNumbers) {
  const auto message = [](const std::string& doc) {
    try {
      load_model_string(doc);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      return std::string(e.what());
    }
    ADD_FAILURE() << "no error for:\n" << doc;
    return std::string();
  };
  EXPECT_NE(message("h2wkit-model v2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("h2wkit-model v1\ndims 1 1 1\nmatrix A\n-1x\n").find("line 4"),
            std::string::npos);
  EXPECT_NE(message("h2wkit-model v1\ndims 1 1 1\nmatrix A\nnan\n").find("line 4"),
            std::string::npos);
  EXPECT_NE(message("h2wkit-model v1\nmatrix A\n-1\n").find("line 2"), std::string::npos);
  message("h2wkit-model v1\ndims 1 1 1\nmatrix A\n-1\nmatrix A\n-1\n");
  message("h2wkit-model v1\ndims 1 1 1\nmatrix A\n-1\nmatrix B\n1\n");
  message("h2wkit-model v1\ndims 1 1 1\nbogus\n");
  message("");
}

TEST(SaveModelTest, FileRoundTrip) {
  const auto m = random_model(5, 2, 3, SpectrumSpec::mixed(0.5), 9, true);
  const auto path = std::filesystem::temp_directory_path() / "h2wkit_roundtrip.ssm";
  save_model_file(path.string(), m, "rt");
  const auto back = load_model_file(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.name, "rt");
  EXPECT_EQ(back.model.A(), m.A());
  EXPECT_EQ(back.model.D(), m.D());
  EXPECT_EQ(error_code_of([] { load_model_file("/nonexistent/model.ssm"); }), ErrorCode::kParse);
}

TEST(RandomModelTest, Deterministic) {
  const auto a = random_model(4, 1, 1, SpectrumSpec::stable(), 42);
  const auto b = random_model(4, 1, 1, SpectrumSpec::stable(), 42);
  EXPECT_EQ(a.A(), b.A());
  EXPECT_EQ(a.B(), b.B());
  EXPECT_EQ(a.C(), b.C());
  EXPECT_NE(a.A(), random_model(4, 1, 1, SpectrumSpec::stable(), 43).A());
}

TEST(RandomModelTest, SpectrumKinds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto st = spectral_decompose(random_model(6, 2, 2, SpectrumSpec::stable(), seed));
    for (Eigen::Index i = 0; i < 6; ++i) {
      EXPECT_GE(st.eigenvalues(i).real(), -10.0 - 1e-9);
      EXPECT_LE(st.eigenvalues(i).real(), -0.05 + 1e-9);
    }
    const auto an = spectral_decompose(random_model(6, 1, 1, SpectrumSpec::antistable(), seed));
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_GT(an.eigenvalues(i).real(), 0.0);

    const auto ld = spectral_decompose(random_model(8, 1, 1, SpectrumSpec::lightly_damped(0.05), seed));
    for (Eigen::Index i = 0; i < 8; ++i) {
      const Complex l = ld.eigenvalues(i);
      EXPECT_NE(l.imag(), 0.0);
      EXPECT_LE(std::abs(l.real()) / std::abs(l), 0.05 + 1e-9);
      EXPECT_GE(std::abs(l), 0.1 - 1e-9);
      EXPECT_LE(std::abs(l), 100 + 1e-6);
    }
  }
}

TEST(RandomModelTest, FeedthroughOnlyWhenRequested) {
  EXPECT_TRUE(random_model(3, 2, 2, SpectrumSpec::stable(), 1).strictly_proper());
  EXPECT_FALSE(random_model(3, 2, 2, SpectrumSpec::stable(), 1, true).strictly_proper());
}

TEST(SpectrumSpecTest, Parse) {
  EXPECT_EQ(parse_spectrum_spec("stable").kind, SpectrumKind::kStable);
  EXPECT_EQ(parse_spectrum_spec("antistable").kind, SpectrumKind::kAntistable);
  EXPECT_DOUBLE_EQ(parse_spectrum_spec("mixed:0.25").p_unstable, 0.25);
  EXPECT_DOUBLE_EQ(parse_spectrum_spec("lightly_damped:0.02").zeta_max, 0.02);
  for (const char* bad : {"", "wobbly", "mixed", "mixed:1.5", "lightly_damped:0", "mixed:x"}) {
    EXPECT_EQ(error_code_of([bad] { parse_spectrum_spec(bad); }), ErrorCode::kInvalidArgument)
        << bad;
  }
}

TEST(ModelFromPolesTest, PlacesRequestedPoles) {
  const auto m = model_from_poles({Complex(-0.5, 0), Complex(-0.01, 1), Complex(-0.2, 10)}, 1, 1, 8);
  ASSERT_EQ(m.order(), 5u);
  const auto sd = spectral_decompose(m);
  for (const Complex want : {Complex(-0.5, 0), Complex(-0.01, 1), Complex(-0.01, -1),
                             Complex(-0.2, 10), Complex(-0.2, -10)}) {
    double best = INFINITY;
    for (Eigen::Index i = 0; i < 5; ++i) best = std::min(best, std::abs(sd.eigenvalues(i) - want));
    EXPECT_LE(best, 1e-10) << want;
  }
  EXPECT_EQ(error_code_of([] { model_from_poles({Complex(-1, -1)}, 1, 1, 1); }),
            ErrorCode::kInvalidArgument);
}

// ---- properties ------------------------------------------------------------

TEST(ModelIoPropertyTest, GeneratorKeepsPolesApart) {
  for_each_seed(0, 1000, [](std::uint64_t seed) {
    Gen g(seed);
    const SpectrumSpec specs[] = {SpectrumSpec::stable(), SpectrumSpec::antistable(),
                                  SpectrumSpec::mixed(0.5), SpectrumSpec::lightly_damped(0.05)};
    const auto m = random_model(g.integer(1, 40), 1, 1, specs[seed % 4], seed);
    const Eigen::VectorXcd l = Eigen::EigenSolver<Eigen::MatrixXd>(m.A(), false).eigenvalues();
    if (l.size() > 1) EXPECT_GE(min_pairwise_gap(l), 1e-3 * (1 - 1e-6));
  });
}

TEST(ModelIoPropertyTest, RoundTripIsExact) {
  for_each_seed(50, 100, [](std::uint64_t seed) {
    Gen g(seed);
    const auto m = random_model(g.integer(1, 12), g.integer(1, 4), g.integer(1, 4),
                                SpectrumSpec::mixed(0.5), seed, g.coin());
    const auto back = load_model_string(save_model_string(m, "m" + std::to_string(seed))).model;
    EXPECT_EQ(back.A(), m.A());
    EXPECT_EQ(back.B(), m.B());
    EXPECT_EQ(back.C(), m.C());
    EXPECT_EQ(back.D(), m.D());
  });
}

}  // namespace
}  // namespace h2wkit
