// Writes deterministic synthetic stand-ins for the MUTAG / PROTEINS
// benchmarks in TUDataset text format, for demos and offline testing.
// Real archives come from tools/fetch_tudataset.py instead.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "synth_data.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic TUDataset-format benchmark generator"};
    std::string which = "MUTAG";
    std::string out_dir = ".";
    uint64_t seed = 2025;
    app.add_option("--benchmark", which, "MUTAG or PROTEINS")->required();
    app.add_option("--out-dir", out_dir, "directory to write <name>/<name>_*.txt into");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        topohk::datagen::write_synth_benchmark(out_dir, which, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "topohk-synth: %s\n", e.what());
        return 2;
    }
    std::printf("wrote synthetic %s under %s/%s (seed %llu)\n", which.c_str(), out_dir.c_str(),
                which.c_str(), static_cast<unsigned long long>(seed));
    return 0;
}
