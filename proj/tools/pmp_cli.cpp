// Command-line front end; talks to the library exclusively through the C API.

#include <cstdio>
#include <cstring>
#include <string>

#include "pmp_capi.h"

namespace {

void print_usage(std::FILE* out) {
    std::fprintf(out,
                 "usage: pmp <command> [options]\n"
                 "\n"
                 "commands:\n"
                 "  synth            generate a synthetic trajectory CSV\n"
                 "  ingest           validate a trajectory CSV and cache the frame index\n"
                 "  label-stats      maneuver label distribution report\n"
                 "  train-mnn        train the trajectory predictor\n"
                 "  train-imitation  train the CNN encoder and imitation heads\n"
                 "  train-drl        train the twin Q networks (frozen encoder)\n"
                 "  evaluate         safety/comfort metrics per policy and split\n"
                 "  replay-render    dump a per-step episode trace\n"
                 "\n"
                 "options:\n"
                 "  -c, --config FILE     key = value config file\n"
                 "  -s, --set KEY=VALUE   override one config key (repeatable)\n"
                 "      --data PATH       shorthand for --set data.input=PATH\n"
                 "      --out DIR         shorthand for --set out.dir=DIR\n"
                 "      --seed N          shorthand for --set seed=N\n"
                 "  -h, --help            this message\n"
                 "\n"
                 "Artifacts are written under the output directory together with a\n"
                 "manifest.csv naming each artifact and the config hash.\n");
}

int fail_with(pmp_status status) {
    std::fprintf(stderr, "pmp: %s: %s\n", pmp_status_name(status), pmp_last_error());
    return status == PMP_ERR_USAGE ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        print_usage(stderr);
        return 2;
    }
    const std::string command = argv[1];
    if (command == "-h" || command == "--help") {
        print_usage(stdout);
        return 0;
    }

    pmp_config* cfg = pmp_config_new();
    if (!cfg) {
        std::fprintf(stderr, "pmp: out of memory\n");
        return 1;
    }

    int rc = 0;
    for (int i = 2; i < argc && rc == 0; ++i) {
        const std::string arg = argv[i];
        auto next_value = [&](const char* what) -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "pmp: %s expects an argument\n", what);
                rc = 2;
                return nullptr;
            }
            return argv[++i];
        };

        if (arg == "-c" || arg == "--config") {
            const char* path = next_value(arg.c_str());
            if (!path) break;
            const pmp_status st = pmp_config_load_file(cfg, path);
            if (st != PMP_OK) rc = fail_with(st);
        } else if (arg == "-s" || arg == "--set") {
            const char* kv = next_value(arg.c_str());
            if (!kv) break;
            const char* eq = std::strchr(kv, '=');
            if (!eq) {
                std::fprintf(stderr, "pmp: --set expects KEY=VALUE, got '%s'\n", kv);
                rc = 2;
                break;
            }
            const std::string key(kv, size_t(eq - kv));
            const pmp_status st = pmp_config_set(cfg, key.c_str(), eq + 1);
            if (st != PMP_OK) rc = fail_with(st);
        } else if (arg == "--data" || arg == "--out" || arg == "--seed") {
            const char* value = next_value(arg.c_str());
            if (!value) break;
            const char* key = arg == "--data" ? "data.input"
                              : arg == "--out" ? "out.dir"
                                               : "seed";
            const pmp_status st = pmp_config_set(cfg, key, value);
            if (st != PMP_OK) rc = fail_with(st);
        } else if (arg == "-h" || arg == "--help") {
            print_usage(stdout);
            pmp_config_free(cfg);
            return 0;
        } else {
            std::fprintf(stderr, "pmp: unknown option '%s'\n", arg.c_str());
            rc = 2;
        }
    }

    if (rc == 0) {
        const pmp_status st = pmp_run_command(cfg, command.c_str());
        if (st != PMP_OK) rc = fail_with(st);
    }

    pmp_config_free(cfg);
    return rc;
}
