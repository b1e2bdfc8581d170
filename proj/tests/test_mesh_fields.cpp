#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/field_io.hpp"
#include "driftlab/fields.hpp"

using namespace driftlab;

namespace {

MeshPtr mesh(const char* name, int res) { return build_mesh(Domain::parse(name), res); }

ScalarField vertex(const MeshPtr& m, const ScalarFn& f) { return sample_scalar(m, f, Sampling::Vertex); }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("driftlab_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Domain, DimensionsAndNames) {
  EXPECT_EQ(Domain::parse("unit_square").dimension(), 2);
  EXPECT_EQ(Domain::parse("unit_disk").dimension(), 2);
  EXPECT_EQ(Domain::parse("unit_cube").dimension(), 3);
  EXPECT_EQ(Domain::parse("unit_ball").dimension(), 3);
  EXPECT_EQ(Domain::parse("unit_ball").name(), "unit_ball");
  EXPECT_THROW(Domain::parse("torus"), ValidationError);
}

TEST(Mesh, SmallestSquare) {
  auto m = mesh("unit_square", 2);
  EXPECT_EQ(m->num_vertices(), 9u);
  EXPECT_EQ(m->num_cells(), 8u);
}

TEST(Mesh, RejectsResolutionBelowTwo) {
  EXPECT_THROW(mesh("unit_square", 1), ValidationError);
}

TEST(Mesh, RefinementShrinksH) {
  for (const char* d : {"unit_square", "unit_disk", "unit_cube", "unit_ball"}) {
    const int r = std::string(d).find("unit_c") == 0 || std::string(d) == "unit_ball" ? 6 : 16;
    EXPECT_LE(mesh(d, 2 * r)->h(), 0.6 * mesh(d, r)->h()) << d;
  }
}

TEST(Mesh, DiskAreaAndBallVolume) {
  EXPECT_NEAR(mesh("unit_disk", 64)->total_volume(), std::numbers::pi, 5e-3);
  EXPECT_NEAR(mesh("unit_ball", 32)->total_volume(), 4.0 * std::numbers::pi / 3.0, 2e-2);
  EXPECT_NEAR(mesh("unit_cube", 4)->total_volume(), 1.0, 1e-12);
}

TEST(Mesh, PositiveVolumesAndBoundaryFlags) {
  for (const char* d : {"unit_square", "unit_disk", "unit_cube", "unit_ball"}) {
    auto m = mesh(d, 8);
    for (std::size_t k = 0; k < m->num_cells(); ++k) ASSERT_GT(m->volume(k), 0.0);
    const Domain& dom = m->domain();
    for (std::size_t v = 0; v < m->num_vertices(); ++v) {
      const Point& x = m->vertex(v);
      double dist;
      if (dom.is_round()) {
        dist = std::abs(norm(x) - 1.0);
      } else {
        dist = 1.0;
        for (int i = 0; i < dom.dimension(); ++i) dist = std::min({dist, x[i], 1.0 - x[i]});
      }
      EXPECT_EQ(m->on_boundary(v), dist <= 1e-12) << d << " vertex " << v;
    }
  }
}

TEST(Mesh, ConformingFacesShared) {
  for (const char* d : {"unit_square", "unit_ball"}) {
    auto m = mesh(d, 6);
    const int nv = m->vertices_per_cell();
    std::map<std::vector<int>, int> faces;
    for (std::size_t k = 0; k < m->num_cells(); ++k) {
      auto c = m->cell(k);
      for (int skip = 0; skip < nv; ++skip) {
        std::vector<int> f;
        for (int i = 0; i < nv; ++i)
          if (i != skip) f.push_back(c[i]);
        std::sort(f.begin(), f.end());
        ++faces[f];
      }
    }
    for (const auto& [f, count] : faces) ASSERT_LE(count, 2);
  }
}

TEST(Gradient, LinearAndConstant) {
  auto m = mesh("unit_square", 8);
  auto gx = gradient(vertex(m, [](const Point& x) { return x[0]; }));
  auto g3 = gradient(vertex(m, [](const Point&) { return 3.0; }));
  for (std::size_t k = 0; k < m->num_cells(); ++k) {
    EXPECT_NEAR(gx.at(k)[0], 1.0, 1e-12);
    EXPECT_NEAR(gx.at(k)[1], 0.0, 1e-12);
    EXPECT_NEAR(norm(g3.at(k)), 0.0, 1e-12);
  }
  EXPECT_THROW(gradient(ScalarField::zeros(m, Layout::Cell)), ValidationError);
}

TEST(Gradient, QuadraticAtCentroids) {
  double prev = 0.0;
  for (int res : {16, 32}) {
    auto m = mesh("unit_square", res);
    auto g = gradient(vertex(m, [](const Point& x) { return x[0] * x[0]; }));
    double err = 0.0;
    for (std::size_t k = 0; k < m->num_cells(); ++k)
      err = std::max(err, norm(g.at(k) - Point{2.0 * m->centroid(k)[0], 0.0, 0.0}));
    EXPECT_LE(err, 2.0 * m->h());
    if (prev > 0.0) { EXPECT_LT(err, 0.6 * prev); }
    prev = err;
  }
}

TEST(Integrate, Oracles) {
  auto sq = mesh("unit_square", 8);
  EXPECT_DOUBLE_EQ(integrate(ScalarField(sq, Layout::Cell, std::vector<double>(sq->num_cells(), 1.0))), 1.0);
  EXPECT_NEAR(integrate(vertex(sq, [](const Point& x) { return x[0]; })), 0.5, 1e-14);
  auto disk = mesh("unit_disk", 64);
  EXPECT_NEAR(integrate_function(*disk, [](const Point& x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; }),
              std::numbers::pi / 2.0, 5e-3);
}

TEST(Integrate, AdditiveOverMasks) {
  auto m = mesh("unit_disk", 16);
  auto f = vertex(m, [](const Point& x) { return std::exp(x[0]) + x[1]; });
  std::vector<std::uint8_t> a(m->num_cells()), b(m->num_cells());
  for (std::size_t k = 0; k < m->num_cells(); ++k) (m->centroid(k)[0] > 0.1 ? a : b)[k] = 1;
  EXPECT_NEAR(integrate(f, a) + integrate(f, b), integrate(f), 1e-13);
}

TEST(H1, Oracles) {
  auto sq = mesh("unit_square", 8);
  EXPECT_EQ(h1_seminorm(ScalarField::zeros(sq, Layout::Vertex)), 0.0);
  EXPECT_NEAR(h1_seminorm(vertex(sq, [](const Point& x) { return x[0]; })), 1.0, 1e-13);
  auto disk = mesh("unit_disk", 64);
  EXPECT_NEAR(h1_seminorm(sample_scalar(disk, "paraboloid", Sampling::Vertex)),
              std::sqrt(2.0 * std::numbers::pi), 1e-2);
}

TEST(Fields, SkewStorageIsAntisymmetric) {
  for (const char* d : {"unit_square", "unit_cube"}) {
    auto m = mesh(d, 4);
    auto A = random_skew(m, 7, 2.0);
    for (std::size_t k = 0; k < m->num_cells(); ++k) {
      const auto M = A.matrix(k);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ASSERT_EQ(M[i][j] + M[j][i], 0.0);
    }
  }
}

TEST(Fields, AxialMatchesCrossProduct) {
  auto m = mesh("unit_cube", 3);
  std::vector<double> w(3 * m->num_cells());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& x : w) x = u(rng);
  const VectorField W(m, w);
  const auto A = SkewField::from_axial(W);
  for (std::size_t k = 0; k < m->num_cells(); ++k) {
    const Point xi{u(rng), u(rng), u(rng)};
    const Point d = A.apply(k, xi) - cross(W.at(k), xi);
    ASSERT_LT(norm(d), 1e-14);
  }
}

TEST(Fields, GradientFormIsSymmetric) {
  auto m = mesh("unit_disk", 12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> a(m->num_vertices()), b(m->num_vertices());
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  const ScalarField u(m, Layout::Vertex, a), v(m, Layout::Vertex, b);
  EXPECT_DOUBLE_EQ(integrate_dot(gradient(u), gradient(v)), integrate_dot(gradient(v), gradient(u)));
}

TEST(Fields, MeshMismatchRejected) {
  auto a = mesh("unit_square", 4), b = mesh("unit_square", 4);
  EXPECT_THROW(ScalarField::zeros(a, Layout::Vertex) + ScalarField::zeros(b, Layout::Vertex),
               ValidationError);
  EXPECT_THROW(ScalarField(a, Layout::Vertex, {1.0, 2.0}), ValidationError);
}

TEST(FieldIo, CsvRoundTrip) {
  const auto dir = scratch("csv");
  auto m = build_mesh(Domain::parse("unit_disk"), 6);
  write_mesh_csv(*m, dir.string());
  auto back = read_mesh_csv(dir.string(), m->domain(), 6);
  ASSERT_EQ(back->num_vertices(), m->num_vertices());
  ASSERT_EQ(back->num_cells(), m->num_cells());
  for (std::size_t v = 0; v < m->num_vertices(); ++v) {
    EXPECT_EQ(back->vertex(v), m->vertex(v));
    EXPECT_EQ(back->on_boundary(v), m->on_boundary(v));
  }
  const auto u = sample_scalar(m, "paraboloid", Sampling::Vertex);
  const auto a = sample_vector(m, "rotation");
  const auto A = random_skew(m, 2);
  write_field_csv(u, (dir / "u.csv").string());
  write_field_csv(a, (dir / "a.csv").string());
  write_field_csv(A, (dir / "A.csv").string());
  EXPECT_EQ(std::get<ScalarField>(read_field_csv((dir / "u.csv").string(), back, "scalar")).values(),
            u.values());
  EXPECT_EQ(std::get<VectorField>(read_field_csv((dir / "a.csv").string(), back, "vector")).values(),
            a.values());
  EXPECT_EQ(std::get<SkewField>(read_field_csv((dir / "A.csv").string(), back, "skew")).values(),
            A.values());
}

TEST(FieldIo, MalformedCsvIsAnIoError) {
  const auto dir = scratch("bad");
  auto m = build_mesh(Domain::parse("unit_square"), 2);
  std::ofstream(dir / "u.csv") << "vertex,c0\n0,1.0\n1,abc\n";
  EXPECT_THROW(read_field_csv((dir / "u.csv").string(), m, "scalar"), IoError);
  std::ofstream(dir / "v.csv") << "vertex,c0\n0,1.0\n2,1.0\n";
  EXPECT_THROW(read_field_csv((dir / "v.csv").string(), m, "scalar"), IoError);
  EXPECT_THROW(read_field_csv((dir / "missing.csv").string(), m, "scalar"), IoError);
}

TEST(FieldIo, JsonContainerRoundTrip) {
  const auto dir = scratch("json");
  MeshOptions opts;
  opts.radial_grading = 2.0;
  FieldBundle bundle;
  bundle.mesh = build_mesh(Domain::parse("unit_ball"), 4, opts);
  bundle.fields.emplace("u", sample_scalar(bundle.mesh, "paraboloid", Sampling::Vertex));
  bundle.fields.emplace("rho", sample_scalar(bundle.mesh, "bump", Sampling::CellAverage));
  bundle.fields.emplace("a", sample_vector(bundle.mesh, "rotation"));
  bundle.fields.emplace("A", random_skew(bundle.mesh, 5));
  const auto path = (dir / "fields.json").string();
  write_json_container(bundle, path);
  const auto back = read_json_container(path);
  EXPECT_EQ(back.mesh->num_cells(), bundle.mesh->num_cells());
  EXPECT_EQ(back.mesh->options().radial_grading, 2.0);
  ASSERT_EQ(back.fields.size(), 4u);
  EXPECT_EQ(std::get<ScalarField>(back.fields.at("rho")).layout(), Layout::Cell);
  EXPECT_EQ(std::get<ScalarField>(back.fields.at("u")).layout(), Layout::Vertex);
  EXPECT_EQ(std::get<SkewField>(back.fields.at("A")).values(),
            std::get<SkewField>(bundle.fields.at("A")).values());
  EXPECT_STREQ(field_kind(back.fields.at("a")), "vector");
}
