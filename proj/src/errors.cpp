#include "errors.hpp"

namespace liketally {

const char* errc_name(errc code) {
    switch (code) {
        case errc::ok: return "ok";
        case errc::io: return "io";
        case errc::parse: return "parse";
        case errc::schema: return "schema";
        case errc::validation: return "validation";
        case errc::config: return "config";
        case errc::missing_series: return "missing_series";
        case errc::empty_group: return "empty_group";
        case errc::empty_matrix: return "empty_matrix";
        case errc::singular_design: return "singular_design";
        case errc::nonconcave_at_optimum: return "nonconcave_at_optimum";
        case errc::bound: return "bound";
        case errc::unknown_topic: return "unknown_topic";
        case errc::no_topical_tweets: return "no_topical_tweets";
        case errc::degenerate_score: return "degenerate_score";
        case errc::incompatible_fits: return "incompatible_fits";
        case errc::domain: return "domain";
        case errc::overflow: return "overflow";
        case errc::invalid_argument: return "invalid_argument";
        case errc::internal: return "internal";
    }
    return "unknown";
}

}  // namespace liketally
