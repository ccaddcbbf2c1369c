#include <gtest/gtest.h>
#include <spdlog/spdlog.h>

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    // Degraded paths log warnings by design; keep test output readable.
    spdlog::set_level(spdlog::level::err);
    return RUN_ALL_TESTS();
}
