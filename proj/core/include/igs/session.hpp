#pragma once

#include "igs/criterion.hpp"
#include "igs/dataset.hpp"
#include "igs/error.hpp"
#include "igs/groups.hpp"
#include "igs/iga.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>

namespace igs {

enum class Phase { awaiting_pick, running, finished };

std::string_view to_string(Phase phase);

/// Failure carrying the HTTP status it maps to.
class SessionError : public Error
{
public:
    SessionError(int status, std::string code, const std::string& message)
        : Error(message), status_(status), code_(std::move(code))
    {
    }
    int status() const { return status_; }
    const std::string& code() const { return code_; }

private:
    int status_;
    std::string code_;
};

/**
 * One interactive IGA run. Mutations are single-writer: a second mutation
 * arriving while one is in flight fails with 409 Busy. Readers always see the
 * last published snapshot.
 */
class Session
{
public:
    Session(std::string id, std::shared_ptr<const Dataset> data, GroupPartition partition, Family family,
            IgaConfig config);

    const std::string& id() const { return id_; }
    Phase phase() const;
    nlohmann::json state() const;

    /// Zero-based group. SessionError 409 when not in A_lambda or not awaiting a pick.
    nlohmann::json pick(int group);
    nlohmann::json auto_step(int steps);
    /// Freezes the session; repeated calls return the same result.
    nlohmann::json finish();

    /// Read-only access for replay checks; not synchronized with mutations.
    const IgaEngine& engine() const { return *engine_; }
    const Objective& objective() const { return *objective_; }
    const GroupPartition& partition() const { return partition_; }

private:
    class MutationGuard;
    void publish(Phase phase);
    nlohmann::json build_state(Phase phase) const;

    std::string id_;
    std::shared_ptr<const Dataset> data_;
    GroupPartition partition_;
    Family family_;
    std::unique_ptr<Objective> objective_;
    std::unique_ptr<IgaEngine> engine_;
    std::chrono::system_clock::time_point created_;

    std::atomic<bool> busy_{false};
    mutable std::mutex snapshot_mutex_;
    Phase phase_ = Phase::awaiting_pick;
    nlohmann::json snapshot_;
    std::optional<nlohmann::json> final_result_;
};

struct HttpReply
{
    int status = 200;
    std::string body;
};

/**
 * In-memory registry of sessions plus a transport-independent router for
 *
 *   POST /sessions                 create (body: data or bundle + config)
 *   GET  /sessions/{id}            state snapshot
 *   POST /sessions/{id}/pick       {"group": int}, one-based
 *   POST /sessions/{id}/auto       {"steps": int}
 *   POST /sessions/{id}/finish     final model and path
 *
 * Create body: either {"bundle": dir} (X.csv, y.csv, groups.json) or inline
 * {"X": [[...]], "y": [...], "groups": {"p", "groups"}}, plus optional
 * "family", "lambda", "scoring", "k_max", "delta_floor", "backward" and
 * "standardize" (default false).
 */
class SessionManager
{
public:
    /// When set, finished sessions are written to persist_dir/<id>.json.
    explicit SessionManager(std::optional<std::filesystem::path> persist_dir = std::nullopt);

    std::shared_ptr<Session> create(const nlohmann::json& request);
    /// SessionError 404 when unknown.
    std::shared_ptr<Session> get(const std::string& id) const;

    HttpReply handle(std::string_view method, std::string_view path, std::string_view body);

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    long next_id_ = 1;
    std::optional<std::filesystem::path> persist_dir_;
};

} // namespace igs
