#include "igs/session.hpp"

#include "igs/error.hpp"
#include "igs/io.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace igs {

namespace {

long long epoch_ms(std::chrono::system_clock::time_point t)
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

HttpReply reply(int status, const Json& body)
{
    return {status, body.dump()};
}

HttpReply error_reply(int status, const std::string& code, const std::string& message)
{
    return reply(status, Json{{"error", code}, {"message", message}});
}

std::vector<std::string> split_path(std::string_view path)
{
    const auto query = path.find('?');
    if (query != std::string_view::npos) path = path.substr(0, query);
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const auto next = path.find('/', pos);
        const auto end = next == std::string_view::npos ? path.size() : next;
        if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

Json parse_body(std::string_view body)
{
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
    try {
        auto j = Json::parse(body);
        if (!j.is_object()) throw SessionError(400, "BadRequest", "request body must be a JSON object");
        return j;
    } catch (const Json::exception& e) {
        throw SessionError(400, "BadRequest", std::string("malformed JSON: ") + e.what());
    }
}

int int_field(const Json& body, const char* key)
{
    const auto it = body.find(key);
    if (it == body.end() || !it->is_number_integer()) {
        throw SessionError(400, "BadRequest", std::string("field '") + key + "' must be an integer");
    }
    return it->get<int>();
}

} // namespace

std::string_view to_string(Phase phase)
{
    switch (phase) {
    case Phase::awaiting_pick:
        return "awaiting_pick";
    case Phase::running:
        return "running";
    case Phase::finished:
        return "finished";
    }
    return "finished";
}

// Holds the single-writer flag for the duration of one mutation.
class Session::MutationGuard
{
public:
    explicit MutationGuard(Session& s) : s_(s)
    {
        bool expected = false;
        if (!s_.busy_.compare_exchange_strong(expected, true)) {
            throw SessionError(409, "Busy", "another mutation of this session is in flight");
        }
    }
    ~MutationGuard() { s_.busy_.store(false); }
    MutationGuard(const MutationGuard&) = delete;
    MutationGuard& operator=(const MutationGuard&) = delete;

private:
    Session& s_;
};

Session::Session(std::string id, std::shared_ptr<const Dataset> data, GroupPartition partition, Family family,
                 IgaConfig config)
    : id_(std::move(id)),
      data_(std::move(data)),
      partition_(std::move(partition)),
      family_(family),
      objective_(make_objective(family, data_)),
      created_(std::chrono::system_clock::now())
{
    engine_ = std::make_unique<IgaEngine>(*objective_, partition_, std::move(config));
    publish(engine_->finished() ? Phase::finished : Phase::awaiting_pick);
}

Phase Session::phase() const
{
    std::lock_guard lock(snapshot_mutex_);
    return phase_;
}

Json Session::state() const
{
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

Json Session::build_state(Phase phase) const
{
    const auto& path = engine_->path();
    Json events = Json::array();
    for (const auto& e : path.events) events.push_back(event_to_json(e));
    Json j = {{"id", id_},
              {"phase", to_string(phase)},
              {"iteration", engine_->iteration()},
              {"active_groups", groups_to_json(engine_->active())},
              {"objective_value", engine_->objective_value()},
              {"Q_null", path.Q_null},
              {"signed_sequence", path.signed_sequence()},
              {"events", events},
              {"config", config_to_json(engine_->config())},
              {"family", to_string(family_)},
              {"m", partition_.m()},
              {"created_ms", epoch_ms(created_)},
              {"updated_ms", epoch_ms(std::chrono::system_clock::now())}};
    if (phase == Phase::awaiting_pick) j["candidates"] = candidates_to_json(engine_->candidates());
    return j;
}

void Session::publish(Phase phase)
{
    Json next = build_state(phase);
    std::lock_guard lock(snapshot_mutex_);
    phase_ = phase;
    snapshot_ = std::move(next);
}

Json Session::pick(int group)
{
    MutationGuard guard(*this);
    if (phase() != Phase::awaiting_pick) {
        throw SessionError(409, "WrongPhase", "session is not awaiting a pick");
    }
    const auto& cands = engine_->candidates();
    const bool allowed = std::any_of(cands.begin(), cands.end(),
                                     [group](const Candidate& c) { return c.group == group && c.in_A_lambda; });
    if (!allowed) {
        throw SessionError(409, "PickOutsideCandidateSet",
                           "group " + std::to_string(group + 1) + " is not in A_lambda");
    }
    publish(Phase::running);
    engine_->advance(group);
    publish(engine_->finished() ? Phase::finished : Phase::awaiting_pick);
    return state();
}

Json Session::auto_step(int steps)
{
    MutationGuard guard(*this);
    if (steps < 0) throw SessionError(400, "BadRequest", "steps must be non-negative");
    if (phase() != Phase::awaiting_pick) {
        throw SessionError(409, "WrongPhase", "session is not awaiting a pick");
    }
    if (steps == 0) return state();
    publish(Phase::running);
    const auto greedy = SelectionPolicy::greedy();
    for (int k = 0; k < steps && engine_->step(greedy); ++k) {
    }
    publish(engine_->finished() ? Phase::finished : Phase::awaiting_pick);
    return state();
}

Json Session::finish()
{
    MutationGuard guard(*this);
    if (final_result_) return *final_result_;
    publish(Phase::finished);

    FittedModel model;
    model.coefficients = to_raw_coefficients(engine_->coefficients(), data_->column_scales);
    model.active = engine_->active();
    model.objective_value = engine_->objective_value();
    model.iteration = engine_->iteration();
    final_result_ = Json{{"state", state()}, {"model", model_to_json(model)}, {"path", path_to_json(engine_->path())}};
    return *final_result_;
}

// ---------------------------------------------------------------------------

SessionManager::SessionManager(std::optional<std::filesystem::path> persist_dir)
    : persist_dir_(std::move(persist_dir))
{
}

std::shared_ptr<Session> SessionManager::create(const Json& request)
{
    try {
        Family family = Family::gaussian;
        if (request.contains("family")) family = parse_family(request.at("family").get<std::string>());

        IgaConfig config;
        if (request.contains("lambda")) config.lambda = request.at("lambda").get<double>();
        if (request.contains("scoring")) config.scoring = parse_scoring_mode(request.at("scoring").get<std::string>());
        if (request.contains("k_max")) config.k_max = request.at("k_max").get<int>();
        if (request.contains("delta_floor")) config.delta_floor = request.at("delta_floor").get<double>();
        if (request.contains("backward")) config.backward = request.at("backward").get<bool>();
        config.validate();

        std::optional<Dataset> raw;
        std::optional<GroupPartition> partition;
        if (request.contains("bundle")) {
            const std::filesystem::path dir = request.at("bundle").get<std::string>();
            raw = read_dataset(dir / "X.csv", dir / "y.csv");
            partition = read_partition(dir / "groups.json");
        } else {
            const auto rows = request.at("X").get<std::vector<std::vector<double>>>();
            const auto y = request.at("y").get<std::vector<double>>();
            if (rows.empty()) throw DimensionError("X has no rows");
            Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != rows.front().size()) throw DimensionError("ragged X rows");
                for (std::size_t j = 0; j < rows[i].size(); ++j) {
                    X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
                }
            }
            raw = Dataset(std::move(X), Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
            partition = partition_from_json(request.at("groups"));
        }
        if (partition->p() != raw->p()) throw DimensionError("groups and X disagree on p");
        const bool scale = request.value("standardize", false);
        auto data = std::make_shared<const Dataset>(scale ? standardize(*raw) : std::move(*raw));

        std::string id;
        {
            std::lock_guard lock(mutex_);
            id = "s" + std::to_string(next_id_++);
        }
        auto session = std::make_shared<Session>(id, std::move(data), std::move(*partition), family, config);
        std::lock_guard lock(mutex_);
        sessions_[id] = session;
        return session;
    } catch (const SessionError&) {
        throw;
    } catch (const Error& e) {
        throw SessionError(400, "BadRequest", e.what());
    } catch (const Json::exception& e) {
        throw SessionError(400, "BadRequest", e.what());
    }
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError(404, "NotFound", "unknown session '" + id + "'");
    return it->second;
}

HttpReply SessionManager::handle(std::string_view method, std::string_view path, std::string_view body)
{
    const auto parts = split_path(path);
    try {
        if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) {
            return error_reply(404, "NotFound", "no route for " + std::string(path));
        }
        if (parts.size() == 1) {
            if (method != "POST") return error_reply(405, "MethodNotAllowed", "use POST /sessions");
            return reply(201, create(parse_body(body))->state());
        }
        const auto session = get(parts[1]);
        if (parts.size() == 2) {
            if (method != "GET") return error_reply(405, "MethodNotAllowed", "use GET /sessions/{id}");
            return reply(200, session->state());
        }
        if (method != "POST") return error_reply(405, "MethodNotAllowed", "mutations use POST");
        const std::string& action = parts[2];
        if (action == "pick") {
            const int group = int_field(parse_body(body), "group");
            try {
                return reply(200, session->pick(group - 1));
            } catch (const SessionError& e) {
                if (e.status() != 409) throw;
                return reply(409, Json{{"error", e.code()}, {"message", e.what()}, {"state", session->state()}});
            }
        }
        if (action == "auto") {
            const auto j = parse_body(body);
            const int steps = j.contains("steps") ? int_field(j, "steps") : 1;
            return reply(200, session->auto_step(steps));
        }
        if (action == "finish") {
            auto result = session->finish();
            if (persist_dir_) {
                std::error_code ec;
                std::filesystem::create_directories(*persist_dir_, ec);
                write_json(*persist_dir_ / (session->id() + ".json"), result);
            }
            return reply(200, result);
        }
        return error_reply(404, "NotFound", "unknown action '" + action + "'");
    } catch (const SessionError& e) {
        return error_reply(e.status(), e.code(), e.what());
    } catch (const Error& e) {
        return error_reply(500, "InternalError", e.what());
    }
}

} // namespace igs
