// Regenerates the checked-in test fixtures and prompt goldens, or verifies
// they match what the current code produces.
//
//   factgpt_fixture_gen <fixtures_dir> <goldens_dir>          regenerate
//   factgpt_fixture_gen --check <fixtures_dir> <goldens_dir>  verify

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "support/fixture.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::set<std::string> file_names(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) names.insert(entry.path().filename().string());
    }
    return names;
}

int compare_dirs(const fs::path& expected, const fs::path& actual, const char* what) {
    int drift = 0;
    const auto expected_names = file_names(expected);
    const auto actual_names = file_names(actual);
    for (const auto& name : expected_names) {
        if (!actual_names.contains(name)) {
            std::cerr << what << ": stale file " << name << " (no longer generated)\n";
            ++drift;
        }
    }
    for (const auto& name : actual_names) {
        if (!expected_names.contains(name)) {
            std::cerr << what << ": missing file " << name << "\n";
            ++drift;
        } else if (slurp(expected / name) != slurp(actual / name)) {
            std::cerr << what << ": " << name << " differs from the generated content\n";
            ++drift;
        }
    }
    return drift;
}

} // namespace

int main(int argc, char** argv) {
    try {
        if (argc == 4 && std::string(argv[1]) == "--check") {
            const fs::path fixtures(argv[2]);
            const fs::path goldens(argv[3]);
            const auto tmp_fixtures = factgpt::testing::make_temp_dir("check_fixtures");
            const auto tmp_goldens = factgpt::testing::make_temp_dir("check_goldens");
            factgpt::testing::write_fixture(tmp_fixtures);
            factgpt::testing::write_goldens(tmp_goldens);
            int drift = compare_dirs(fixtures, tmp_fixtures, "fixtures");
            drift += compare_dirs(goldens, tmp_goldens, "goldens");
            fs::remove_all(tmp_fixtures);
            fs::remove_all(tmp_goldens);
            if (drift > 0) {
                std::cerr << "checked-in fixtures/goldens are out of date; rerun "
                             "factgpt_fixture_gen <fixtures_dir> <goldens_dir>\n";
                return 1;
            }
            std::cout << "fixtures and goldens are up to date\n";
            return 0;
        }
        if (argc == 3) {
            factgpt::testing::write_fixture(argv[1]);
            factgpt::testing::write_goldens(argv[2]);
            std::cout << "wrote fixtures to " << argv[1] << " and goldens to " << argv[2] << "\n";
            return 0;
        }
        std::cerr << "usage: factgpt_fixture_gen [--check] <fixtures_dir> <goldens_dir>\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fixture_gen: " << e.what() << '\n';
        return 1;
    }
}
