#include "xtalk/errors.hpp"
#include "xtalk/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

struct Args {
    std::string spec;
    std::string out;
    std::optional<double> threshold_khz;
    std::string envelope = "exp";
    std::string normalize = "true";
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--spec", a.spec, "device spec (.json or device-table .csv)")->required();
    sub->add_option("--out", a.out, "output directory")->required();
    sub->add_option("--threshold-khz", a.threshold_khz, "detection threshold override, kHz")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--envelope", a.envelope, "distance envelope for scaling predictions")
        ->check(CLI::IsMember({"exp", "k0"}));
    sub->add_option("--normalize-at-nn", a.normalize, "normalise the envelope at the nearest-neighbour spacing")
        ->check(CLI::IsMember({"true", "false"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"xtalk: crosstalk toolkit for 2D transmon lattices (MHz, kHz, mm)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(xtalk::kToolkitVersion));
    Args args;
    std::map<CLI::App*, std::string> names;
    for (const char* name : {"capmat", "couplings", "chain", "enclosure", "ed", "fit", "report"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " step");
        add_common(sub, args);
        names[sub] = name;
    }
    auto* zz = app.add_subcommand("zz", "ZZ predictions");
    zz->require_subcommand(1);
    auto* predict = zz->add_subcommand("predict", "perturbative and scaling-law ZZ for every pair");
    add_common(predict, args);
    names[predict] = "zz predict";

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    std::string command;
    for (const auto& [sub, name] : names)
        if (sub->parsed()) command = name;

    xtalk::PipelineOptions opt;
    opt.threshold_khz = args.threshold_khz;
    opt.envelope = args.envelope == "k0" ? xtalk::EnvelopeKind::K0 : xtalk::EnvelopeKind::Exp;
    opt.normalize_at_nn = args.normalize == "true";

    xtalk::DeviceSpec spec;
    try {
        spec = xtalk::load_device_spec(args.spec);
    } catch (const xtalk::Error& e) {
        std::cerr << "xtalk: invalid spec: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const auto report = xtalk::run_pipeline(spec, {command}, args.out, opt);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
        for (const auto& o : report.outputs) std::cout << args.out << '/' << o << '\n';
        return report.ok() ? kExitOk : kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "xtalk: " << e.what() << '\n';
        return kExitComputation;
    }
}
