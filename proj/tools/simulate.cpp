// SPDX-License-Identifier: Apache-2.0
//
// trsim: multiuser time-reversal precoding simulator for discrete multipath channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trsim/common.hpp"
#include "trsim/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitCompute = 4;

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{
        "trsim batch simulator: runs time-reversal precoding experiments from a JSON config"};
    app.footer(
        "Exit codes:\n"
        "  0  success\n"
        "  2  usage or config error\n"
        "  3  file I/O or data format error\n"
        "  4  computation error");

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    unsigned workers = 0;
    app.add_option("config", config_path, "JSON run configuration file")->required();
    app.add_option("--seed", seed, "override the run seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--workers", workers, "override the worker thread count (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    trsim::RunConfig config;
    try {
        config = trsim::load_run_config(config_path);
    } catch (const trsim::io_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (app.count("--seed") > 0) {
        config.seed = seed;
    }
    if (app.count("--out") > 0) {
        if (out_dir.empty()) {
            std::cerr << "config error: --out must be non-empty\n";
            return kExitConfig;
        }
        config.output_dir = out_dir;
    }
    if (app.count("--workers") > 0) config.workers = workers;

    try {
        const trsim::RunOutcome outcome = trsim::run_experiment(config);
        for (const std::string &w : outcome.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "experiment: " << trsim::to_string(config.experiment) << "\n";
        std::cout << "config digest: " << outcome.config_digest << "\n";
        for (const std::string &name : outcome.files)
            std::cout << "wrote " << (std::filesystem::path(config.output_dir) / name).string()
                      << "\n";
        std::cout << "wrote " << outcome.manifest_path << "\n";
        return kExitOk;
    } catch (const trsim::io_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const trsim::format_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
}
