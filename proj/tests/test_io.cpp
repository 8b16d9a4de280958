#include "igs/error.hpp"
#include "igs/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace igs;
using namespace igs::test_util;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("igs_io_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    void write_text(const fs::path& p, const std::string& text)
    {
        std::ofstream out(p);
        out << text;
    }

    fs::path dir_;
};

} // namespace

TEST_F(TempDir, CsvRoundTripIsExact)
{
    std::mt19937_64 rng(51);
    Eigen::MatrixXd M = random_matrix(7, 4, rng);
    M(0, 0) = 1e-300;
    M(1, 1) = -0.1;
    write_csv_matrix(dir_ / "m.csv", M);
    EXPECT_EQ(read_csv_matrix(dir_ / "m.csv"), M);
}

TEST_F(TempDir, CsvHeaderAndErrors)
{
    write_text(dir_ / "h.csv", "a,b\n1,2\n\n3,4\n");
    const auto M = read_csv_matrix(dir_ / "h.csv");
    ASSERT_EQ(M.rows(), 2);
    EXPECT_EQ(M(1, 1), 4.0);

    write_text(dir_ / "ragged.csv", "1,2\n3\n");
    EXPECT_THROW(read_csv_matrix(dir_ / "ragged.csv"), FormatError);
    write_text(dir_ / "text.csv", "1,2\nx,4\n");
    EXPECT_THROW(read_csv_matrix(dir_ / "text.csv"), FormatError);
    write_text(dir_ / "empty.csv", "");
    EXPECT_THROW(read_csv_matrix(dir_ / "empty.csv"), FormatError);
    EXPECT_THROW(read_csv_matrix(dir_ / "missing.csv"), FormatError);
}

TEST_F(TempDir, DatasetShapesAreChecked)
{
    write_text(dir_ / "X.csv", "1,2\n3,4\n5,6\n");
    write_text(dir_ / "y.csv", "1\n2\n");
    EXPECT_THROW(read_dataset(dir_ / "X.csv", dir_ / "y.csv"), DimensionError);
    write_text(dir_ / "y.csv", "1\n2\n3\n");
    const auto d = read_dataset(dir_ / "X.csv", dir_ / "y.csv");
    EXPECT_EQ(d.n(), 3);
    EXPECT_EQ(d.p(), 2);
}

TEST(PartitionJson, RoundTripAndValidation)
{
    const GroupPartition part({{0, 3}, {1}, {2, 4}}, 5);
    const auto j = partition_to_json(part);
    EXPECT_EQ(j.at("p"), 5);
    EXPECT_EQ(partition_from_json(j).groups(), part.groups());
    EXPECT_THROW(partition_from_json(Json{{"p", 3}}), FormatError);
    EXPECT_THROW(partition_from_json(Json{{"p", 3}, {"groups", {{0, 1}, {1, 2}}}}), OverlapError);
    EXPECT_THROW(partition_from_json(Json{{"p", 3}, {"groups", {{0, 1}}}}), CoverageError);
}

TEST(VectorJson, RoundTripIsExact)
{
    std::mt19937_64 rng(52);
    const Eigen::VectorXd v = random_vector(50, rng, 1e3);
    EXPECT_EQ(vector_from_json(Json::parse(vector_to_json(v).dump())), v);
    EXPECT_THROW(vector_from_json(Json{{"a", 1}}), FormatError);
}

TEST(PathJson, GroupsAreOneBased)
{
    SelectionPath path;
    path.Q_null = 2.0;
    path.events = {{Action::add, 0, 1.5, 0.5, 1}, {Action::add, 3, 1.0, 0.5, 2}, {Action::remove, 0, 1.2, 0.5, 2}};
    path.snapshots = {{1, GroupSet({0}), Eigen::VectorXd::Zero(2)}, {2, GroupSet({3}), Eigen::VectorXd::Zero(2)}};
    const auto j = path_to_json(path);
    EXPECT_EQ(j.at("signed_sequence"), Json({1, 4, -1}));
    EXPECT_EQ(j.at("events")[2].at("action"), "remove");
    EXPECT_EQ(j.at("events")[1].at("group"), 4);
    EXPECT_EQ(j.at("snapshots")[1].at("active_groups"), Json({4}));
}

TEST_F(TempDir, BundleReloadsToTheSameInstance)
{
    SimSpec spec;
    spec.n = 30;
    spec.p = 20;
    spec.m = 4;
    spec.q = 5;
    spec.kbar = 2;
    spec.seed = 53;
    const auto inst = gen_case1(spec);
    write_bundle(dir_ / "b", inst);
    const auto data = read_dataset(dir_ / "b" / "X.csv", dir_ / "b" / "y.csv");
    EXPECT_EQ(data.X, inst.data.X);
    EXPECT_EQ(data.y, inst.data.y);
    EXPECT_EQ(read_partition(dir_ / "b" / "groups.json").groups(), inst.partition.groups());
    const auto truth = read_json(dir_ / "b" / "truth.json");
    EXPECT_EQ(vector_from_json(truth.at("w_star")), inst.truth);
    EXPECT_EQ(truth.at("relevant_groups"), Json({1, 3}));
    EXPECT_EQ(truth.at("seed"), 53);
}

TEST_F(TempDir, WriteJsonIsPrettyWithTrailingNewline)
{
    write_json(dir_ / "a.json", Json{{"x", 1}});
    std::ifstream in(dir_ / "a.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, "{\n  \"x\": 1\n}\n");
    write_text(dir_ / "bad.json", "{");
    EXPECT_THROW(read_json(dir_ / "bad.json"), FormatError);
}
