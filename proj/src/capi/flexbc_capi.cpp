#include "flexbc/flexbc.h"

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "core/experiment.hpp"

struct flexbc_context {
    std::string config_json;
    std::string report;
    std::string resolved;
    std::string error;
    bool has_report = false;
};

namespace {

void copy_error(const std::string& message, char* errbuf, size_t errbuf_len) {
    if (errbuf == nullptr || errbuf_len == 0) return;
    const size_t n = std::min(message.size(), errbuf_len - 1);
    std::memcpy(errbuf, message.data(), n);
    errbuf[n] = '\0';
}

} // namespace

extern "C" {

flexbc_context* flexbc_create(const char* config_json, char* errbuf, size_t errbuf_len) {
    if (config_json == nullptr) {
        copy_error("config_json is NULL", errbuf, errbuf_len);
        return nullptr;
    }
    try {
        flexbc::parse_config(config_json); // validate eagerly
        auto* ctx = new flexbc_context;
        ctx->config_json = config_json;
        return ctx;
    } catch (const std::exception& e) {
        copy_error(e.what(), errbuf, errbuf_len);
        return nullptr;
    }
}

void flexbc_destroy(flexbc_context* ctx) { delete ctx; }

int flexbc_apply_overrides(flexbc_context* ctx, const char* const* overrides,
                           size_t count) {
    if (ctx == nullptr) return FLEXBC_CONFIG_ERROR;
    try {
        std::vector<std::string> ov;
        for (size_t i = 0; i < count; ++i) {
            if (overrides[i] == nullptr) throw flexbc::ConfigError("NULL override");
            ov.emplace_back(overrides[i]);
        }
        const std::string updated = flexbc::apply_overrides(ctx->config_json, ov);
        flexbc::parse_config(updated); // reject bad overrides atomically
        ctx->config_json = updated;
        ctx->error.clear();
        return FLEXBC_OK;
    } catch (const std::exception& e) {
        ctx->error = e.what();
        return FLEXBC_CONFIG_ERROR;
    }
}

int flexbc_execute(flexbc_context* ctx, const char* subcommand, int quiet) {
    if (ctx == nullptr || subcommand == nullptr) return FLEXBC_CONFIG_ERROR;
    const flexbc::CommandResult result =
        flexbc::dispatch(subcommand, ctx->config_json, quiet != 0);
    ctx->report = result.report;
    ctx->has_report = true;
    if (result.exit_code != FLEXBC_OK)
        ctx->error = result.report;
    else
        ctx->error.clear();
    return result.exit_code;
}

const char* flexbc_report(const flexbc_context* ctx) {
    if (ctx == nullptr || !ctx->has_report) return nullptr;
    return ctx->report.c_str();
}

const char* flexbc_resolved_config(flexbc_context* ctx) {
    if (ctx == nullptr) return nullptr;
    try {
        ctx->resolved = flexbc::resolved_config_json(flexbc::parse_config(ctx->config_json));
        return ctx->resolved.c_str();
    } catch (const std::exception& e) {
        ctx->error = e.what();
        return nullptr;
    }
}

const char* flexbc_last_error(const flexbc_context* ctx) {
    if (ctx == nullptr || ctx->error.empty()) return nullptr;
    return ctx->error.c_str();
}

const char* flexbc_version(void) { return "0.1.0"; }

} // extern "C"
