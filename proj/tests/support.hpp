#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ctrag/corpus.hpp"
#include "ctrag/time.hpp"

namespace ctrag::testing {

// Removed on destruction; each instance gets a fresh directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ctrag-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Timestamp ts(const char* text) { return *parse_rfc3339(text); }

inline ContextItem make_item(std::string id, AppId app, std::string title, std::string body,
                             const char* when = "2023-12-05T10:00:00Z", std::int64_t access = 1) {
  ContextItem item;
  item.id = std::move(id);
  item.app = app;
  item.title = std::move(title);
  item.body = std::move(body);
  item.timestamp = ts(when);
  item.access_count = access;
  return item;
}

inline Persona make_persona(std::string id) {
  Persona p;
  p.id = std::move(id);
  p.attributes["profession"] = "teacher";
  for (AppId app : kAllApps) p.app_usage_profile[app] = 1.0 / static_cast<double>(kNumApps);
  return p;
}

// One persona with a calendar store and a notes store, the default toolbox and two queries.
inline Corpus toy_corpus() {
  Corpus c;
  c.personas.push_back(make_persona("p1"));
  ContextStore cal{"p1", AppId::kCalendar, {}};
  cal.items.push_back(make_item("p1-i1", AppId::kCalendar, "Guitar Class", "weekly guitar lesson with Sam"));
  cal.items.push_back(make_item("p1-i2", AppId::kCalendar, "Dentist", "checkup at the clinic"));
  cal.items.back().categorical_tags["location"] = "Main Street Clinic";
  ContextStore notes{"p1", AppId::kNotes, {}};
  notes.items.push_back(make_item("p1-i3", AppId::kNotes, "Trip to Seattle Plan", "visit the art museum"));
  notes.items.push_back(make_item("p1-i4", AppId::kNotes, "Groceries", "buy milk and eggs"));
  c.stores = {cal, notes};
  c.toolbox = default_toolbox();

  LabeledQuery q1;
  q1.id = "q1";
  q1.persona_id = "p1";
  q1.text = "When is my next guitar lesson?";
  q1.timestamp = ts("2023-12-07T10:30:00Z");
  q1.gold_context_ids = {"p1-i1"};
  q1.gold_tools = {"get_event_details", "get_upcoming_events"};
  q1.gold_plan = Plan{"get_event_details", {{"title", "Guitar Class"}}, false};
  q1.split = Split::kTest;
  LabeledQuery q2 = q1;
  q2.id = "q2";
  q2.text = "Which museum did I want to see?";
  q2.gold_context_ids = {"p1-i3"};
  q2.gold_tools = {"read_note"};
  q2.gold_plan = Plan{"read_note", {{"title", "Trip to Seattle Plan"}}, false};
  c.queries = {q1, q2};
  return c;
}

}  // namespace ctrag::testing
