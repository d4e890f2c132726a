#pragma once

// Shared test fixtures: temp-dir management and small CSV cohorts.

#include <filesystem>
#include <fstream>
#include <string>

#include "tbeval/cohort.hpp"

namespace fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tbeval_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline const char* kCasesHeader =
    "case_id,dataset,patient_id,tb_label,dls_tb_score,dls_abnormal_score,age,sex,hiv_status,"
    "smear_status,tb_history,cough,weight_loss,fever,night_sweats,shortness_of_breath,chest_pain";
inline const char* kReadsHeader = "case_id,reader_id,tb_call,abnormal_call,technical_issue";
inline const char* kReadersHeader = "reader_id,cohort_tag,years_experience";

/// 3 cases (2 pos, 1 neg), 2 readers, 6 reads; all optional fields present.
inline tbeval::Cohort small_cohort(const TempDir& dir) {
    write_file(dir.file("cases.csv"), std::string(kCasesHeader) + "\n" +
        "case1,india,pat1,1,0.9,0.8,34,female,negative,positive,0,1,0,1,0,0,0\n"
        "case2,india,pat2,1,0.6,0.5,51,male,positive,negative,1,1,1,0,0,1,0\n"
        "case3,india,pat3,0,0.2,0.1,27,female,negative,unknown,0,0,0,0,0,0,0\n");
    write_file(dir.file("reads.csv"), std::string(kReadsHeader) + "\n"
        "case1,r1,1,1,0\n"
        "case2,r1,0,0,1\n"
        "case3,r1,0,0,0\n"
        "case1,r2,1,1,0\n"
        "case2,r2,1,1,0\n"
        "case3,r2,1,0,0\n");
    write_file(dir.file("readers.csv"), std::string(kReadersHeader) + "\n"
        "r1,india_based,6\n"
        "r2,us_based,11\n");
    return tbeval::load_cohort(dir.file("cases.csv"), dir.file("reads.csv"),
                               dir.file("readers.csv"));
}

/// In-memory cohort with the given class sizes; scores separate the classes.
inline tbeval::Cohort sized_cohort(const std::string& dataset, std::size_t n_cases,
                                   std::size_t n_positive) {
    tbeval::Cohort cohort;
    for (std::size_t i = 0; i < n_cases; ++i) {
        tbeval::CaseRecord c;
        c.case_id = dataset + "_case" + std::to_string(i + 1);
        c.dataset = dataset;
        c.patient_id = dataset + "_pat" + std::to_string(i + 1);
        c.tb_positive = i < n_positive;
        c.dls_tb_score = c.tb_positive ? 0.8 : 0.2;
        cohort.cases.push_back(std::move(c));
    }
    return cohort;
}

}  // namespace fixtures
