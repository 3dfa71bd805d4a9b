#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rep/commands.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

void apply_thread_cap()
{
    const char* env = std::getenv("REP_THREADS");
    if (env == nullptr || *env == '\0')
        return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
        std::cerr << "warning: ignoring REP_THREADS=" << env << '\n';
        return;
    }
#ifdef _OPENMP
    omp_set_num_threads(static_cast<int>(n));
#endif
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Relativistic Euler-Poisson blowup laboratory"};
    app.require_subcommand(1);

    std::string config, out;
    bool quiet = false;
    for (const char* name : {"certify", "simulate", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "TOML configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->required();
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    }
    app.description(
        "certify:  evaluate the blowup certificate\n"
        "simulate: run the solver and write series, profiles and plots\n"
        "verify:   simulate, then check the structural properties and the Riccati bound\n"
        "exit codes: 0 ok, 1 usage/config/IO error, 2 hypothesis violated, 10 criterion false or verification failed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rep::kExitUsage;
    }

    apply_thread_cap();
    const auto* sub = app.get_subcommands().front();
    rep::CommandContext ctx{out, quiet, &std::cout, &std::cerr};
    return rep::run_command(sub->get_name(), config, ctx);
}
