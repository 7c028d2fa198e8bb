#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "test_support.hpp"
#include "vrnmf/io.hpp"

namespace vrnmf {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vrnmf_io_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(MatrixCsv, RoundTripIsExact) {
    Rng rng(111);
    const fs::path dir = scratch_dir("roundtrip");
    DenseMatrix m = testing::gaussian_matrix(rng, 17, 5);
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    m(1, 1) = std::numeric_limits<double>::max();
    m(2, 2) = -0.0;
    m(3, 3) = 0.1;
    io::write_matrix(dir / "m.csv", m);
    const DenseMatrix back = io::read_matrix(dir / "m.csv");
    ASSERT_EQ(back.rows(), m.rows());
    ASSERT_EQ(back.cols(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_EQ(back.data()[i], m.data()[i]);
    fs::remove_all(dir);
}

TEST(MatrixCsv, FormatIsPlainCommaSeparated) {
    const fs::path dir = scratch_dir("format");
    DenseMatrix m(2, 2);
    m << 1, 0.5, -2, 1e-20;
    io::write_matrix(dir / "m.csv", m);
    EXPECT_EQ(slurp(dir / "m.csv"), "1,0.5\n-2,9.9999999999999995e-21\n");
    fs::remove_all(dir);
}

TEST(MatrixCsv, BadFilesRejected) {
    const fs::path dir = scratch_dir("bad");
    EXPECT_THROW(io::read_matrix(dir / "missing.csv"), IoError);
    io::write_text(dir / "ragged.csv", "1,2\n3\n");
    EXPECT_THROW(io::read_matrix(dir / "ragged.csv"), IoError);
    io::write_text(dir / "word.csv", "1,x\n");
    EXPECT_THROW(io::read_matrix(dir / "word.csv"), IoError);
    io::write_text(dir / "nan.csv", "1,nan\n");
    EXPECT_THROW(io::read_matrix(dir / "nan.csv"), IoError);
    io::write_text(dir / "empty.csv", "\n");
    EXPECT_THROW(io::read_matrix(dir / "empty.csv"), IoError);
    io::write_text(dir / "crlf.csv", "1, 2\r\n3,4\r\n");
    EXPECT_EQ(io::read_matrix(dir / "crlf.csv"), (DenseMatrix{{1, 2}, {3, 4}}));
    fs::remove_all(dir);
}

TEST(SolverConfigJson, RoundTrip) {
    SolverConfig cfg;
    cfg.lambda = 0.25;
    cfg.kind = RegularizerKind::logdet(1e-4);
    cfg.outer_iters = 17;
    cfg.h_opts.max_iters = 33;
    cfg.w_inner_iters = 7;
    cfg.seed = 12345678901234ULL;
    cfg.trace_every = 3;
    cfg.early_exit_rel_change = 1e-9;
    const SolverConfig back = io::solver_config_from_json(io::to_json(cfg));
    EXPECT_EQ(io::to_json(back), io::to_json(cfg));
    EXPECT_THROW(io::solver_config_from_json(nlohmann::json{{"regularizer", "nope"}}), ContractError);
}

TEST(ParseList, NumbersAndErrors) {
    EXPECT_EQ(io::parse_list("0.9,0.8, 0.7"), (std::vector<double>{0.9, 0.8, 0.7}));
    EXPECT_THROW(io::parse_list("0.9,a"), ContractError);
}

TEST(Labels, TextAndPpm) {
    const fs::path dir = scratch_dir("labels");
    LabelGrid g(2, 3);
    g << 1, 2, 3, 3, 2, 1;
    EXPECT_EQ(io::format_labels(g), "1 2 3\n3 2 1\n");
    io::write_label_ppm(dir / "g.ppm", g);
    const std::string ppm = slurp(dir / "g.ppm");
    EXPECT_EQ(ppm.rfind("P3\n3 2\n255\n", 0), 0u);
    fs::remove_all(dir);
}

}  // namespace
}  // namespace vrnmf
