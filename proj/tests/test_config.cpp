#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <string>

#include "insulation/config.hpp"
#include "insulation/error.hpp"
#include "insulation/output.hpp"

using namespace insulation;

namespace {

const char* kSquare = R"({
  "domain": {
    "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]],
    "facets": [
      {"vertices": [0, 1], "label": "neumann", "value": 0.5},
      {"vertices": [1, 2], "label": "insulated"},
      {"vertices": [2, 3], "label": "neumann"},
      {"vertices": [3, 0], "label": "dirichlet", "value": 1}
    ]
  }
})";

ErrorKind kind_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Io;
}

}  // namespace

TEST(Config, MinimalSquareTakesDefaults) {
  const RunConfig cfg = parse_config(kSquare);
  EXPECT_EQ(cfg.solver.tol, 1e-10);
  EXPECT_EQ(cfg.solver.n_t, 4);
  EXPECT_EQ(cfg.field_mode, FieldMode::Bisector);
  EXPECT_FALSE(cfg.mass.has_value());
  ASSERT_EQ(cfg.facets.size(), 4u);
  EXPECT_EQ(cfg.facets[3].label, FacetLabel::Dirichlet);
  EXPECT_EQ(cfg.facets[0].value, 0.5);
  const PolygonalDomain domain = make_domain(cfg);
  EXPECT_DOUBLE_EQ(domain.area(), 1.0);
}

TEST(Config, CommandRequirements) {
  std::string message;
  EXPECT_EQ(kind_of([] { parse_config(kSquare, "solve-reduced"); }, &message), ErrorKind::SchemaError);
  EXPECT_NE(message.find("mass"), std::string::npos);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, "solve-eps"); }, &message), ErrorKind::SchemaError);
  EXPECT_NE(message.find("epsilon"), std::string::npos);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, "gamma-sweep"); }, &message), ErrorKind::SchemaError);
  EXPECT_NE(message.find("epsilon_list"), std::string::npos);
  EXPECT_NO_THROW(parse_config(kSquare, "solve-limit"));
}

TEST(Config, EpsilonListMustDecrease) {
  std::string message;
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"solver.epsilon_list=[0.1,0.2]"}, "gamma-sweep"); }, &message),
            ErrorKind::SchemaError);
  EXPECT_NE(message.find("epsilon_list"), std::string::npos);
  const RunConfig ok = parse_config(kSquare, {"solver.epsilon_list=[0.2,0.1]"}, "gamma-sweep");
  EXPECT_EQ(ok.solver.epsilon_list, (std::vector<double>{0.2, 0.1}));
}

TEST(Config, StrictSchema) {
  std::string message;
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"solver.hh=0.1"}, ""); }, &message), ErrorKind::SchemaError);
  EXPECT_NE(message.find("solver.hh"), std::string::npos);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"solver.h=\"fine\""}, ""); }), ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"solver.h=-1"}, ""); }), ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([] { parse_config("{not json", ""); }), ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"domain.facets.1.label=foam"}, ""); }), ErrorKind::UnknownLabel);
  EXPECT_EQ(kind_of([] { parse_config(kSquare, {"field_mode=radial"}, ""); }), ErrorKind::SchemaError);
}

TEST(Config, OverridesApply) {
  const RunConfig cfg = parse_config(kSquare, {"mass=2", "solver.method=alternating", "field_mode=facet_normal"}, "solve-reduced");
  EXPECT_EQ(cfg.mass, 2.0);
  EXPECT_EQ(cfg.solver.method, ReducedMethod::Alternating);
  EXPECT_EQ(cfg.field_mode, FieldMode::FacetNormal);
}

TEST(Config, RoundTrip) {
  RunConfig cfg = parse_config(kSquare, {"mass=0.75", "solver.epsilon=0.05", "solver.epsilon_list=[0.1,0.05]",
                                         "solver.robin_quadrature=lumped", "output.csv=out.csv", "lebesgue.p=2",
                                         "distribution.value=0.3", "d_min=0.01", "data.f=1.25"},
                               "gamma-sweep");
  const RunConfig again = parse_config(serialize_config(cfg), "gamma-sweep");
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(serialize_config(again), serialize_config(cfg));
}

TEST(Output, FormatAndCsv) {
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  CsvTable t{{"a", "b"}, {}};
  t.add({"1", "2"});
  const NumericCsv parsed = parse_numeric_csv(t.str(), "inline");
  EXPECT_EQ(parsed.column("b"), 1u);
  EXPECT_EQ(parsed.rows.at(0).at(1), 2.0);
  EXPECT_THROW(parsed.column("c"), Error);
}

TEST(Output, AtomicWriteAndIoErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "insulation_config_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.txt").string();
  write_atomic(path, "hello\n");
  EXPECT_EQ(read_file(path), "hello\n");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) EXPECT_EQ(entry.path().filename(), "x.txt");
  EXPECT_EQ(kind_of([&] { read_file((dir / "missing").string()); }), ErrorKind::Io);
  EXPECT_EQ(kind_of([&] { write_atomic((dir / "x.txt" / "y.txt").string(), "x"); }), ErrorKind::Io);
  write_atomic((dir / "made" / "y.txt").string(), "y");
  EXPECT_EQ(read_file((dir / "made" / "y.txt").string()), "y");
  std::filesystem::remove_all(dir);
}
