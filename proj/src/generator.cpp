#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "ctrag/corpus.hpp"
#include "ctrag/errors.hpp"

namespace ctrag {

namespace {

// Query volume of the reference dataset: 4338 train + 936 test over 791 personas.
constexpr double kQueriesPerPersona = 5274.0 / 791.0;
constexpr double kTestFraction = 936.0 / 5274.0;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Distributions are hand-rolled: std:: distributions are not specified bit-for-bit.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool chance(double p) { return uniform() < p; }

  int poisson(double mean) {
    const double limit = std::exp(-mean);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  double exponential() { return -std::log(1.0 - uniform()); }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  // `count` distinct elements in random order
  template <typename T>
  std::vector<T> sample(const std::vector<T>& v, std::size_t count) {
    std::vector<T> copy = v;
    shuffle(copy);
    copy.resize(std::min(count, copy.size()));
    return copy;
  }

 private:
  std::mt19937_64 engine_;
};

using Strings = std::vector<std::string>;
using Slots = std::map<std::string, std::string>;

const Strings kFirstNames = {"Maria", "John", "Priya", "Chen", "Fatima", "Lucas", "Emma", "Omar",
                             "Sofia", "Noah", "Aiko", "Diego", "Hannah", "Ravi", "Elena", "Kwame",
                             "Olivia", "Mateo", "Yuki", "Samir", "Grace", "Leon", "Nadia", "Ethan"};
const Strings kLastNames = {"Lopez", "Doe", "Sharma", "Wang", "Khan", "Silva", "Novak", "Haddad",
                            "Rossi", "Kim", "Tanaka", "Garcia", "Becker", "Patel", "Ivanova", "Mensah",
                            "Brown", "Costa", "Sato", "Nasser", "Miller", "Fischer", "Ali", "Cohen"};
const Strings kProfessions = {"Software Developer", "Nurse", "Teacher", "Accountant", "Architect",
                              "Graphic Designer", "Pharmacist", "Lawyer", "Chef", "Data Analyst",
                              "Electrician", "Journalist", "Marketing Manager", "Physiotherapist",
                              "Civil Engineer", "Librarian"};
const Strings kGenres = {"Pop", "Rock", "Jazz", "Classical", "Hip Hop", "Country", "Electronic", "Indie"};
const Strings kMovieGenres = {"Romance", "Comedy", "Thriller", "Drama", "Science Fiction", "Horror",
                              "Documentary", "Animation"};
const Strings kCuisines = {"Italian", "Mexican", "Thai", "Japanese", "Indian", "French", "Greek",
                           "Korean", "Ethiopian", "Vietnamese"};
const Strings kSports = {"Tennis", "Soccer", "Basketball", "Golf", "Volleyball", "Baseball", "Badminton",
                         "Squash"};
const Strings kHobbies = {"Guitar", "Piano", "Cooking", "Painting", "Photography", "Gardening", "Hiking",
                          "Chess", "Knitting", "Dancing", "Pottery", "Climbing", "Baking", "Swimming",
                          "Yoga", "Violin"};
const Strings kCities = {"Rome", "Paris", "Tokyo", "Lisbon", "Denver", "Austin", "Seattle", "Boston",
                         "Chicago", "Madrid", "Dublin", "Vienna", "Prague", "Toronto"};
const Strings kProjects = {"LLM", "Budget", "Roadmap", "Hiring", "Migration", "Launch", "Analytics",
                           "Security", "Onboarding", "Pricing"};
const Strings kMeetingKinds = {"Discussion", "Sync", "Review", "Planning"};
const Strings kCompanies = {"Comcast", "Verizon", "Geico", "Allstate", "Xfinity", "Duke Energy",
                            "Citibank", "Equinox"};
const Strings kGroceries = {"Milk", "Eggs", "Bread", "Coffee Beans", "Apples", "Rice", "Spinach",
                            "Olive Oil", "Yogurt", "Tomatoes"};
const Strings kDiets = {"Intermittent Fasting", "Keto Diet", "Mediterranean Diet", "Low Carb Diet",
                        "Vegan Meal", "High Protein Diet"};
const Strings kAppointments = {"Dentist", "Doctor", "Haircut", "Vet", "Optometrist", "Therapist"};
const Strings kSongWordsA = {"Midnight", "Golden", "Electric", "Silver", "Broken", "Summer", "Neon",
                             "Wild", "Quiet", "Paper", "Velvet", "Distant"};
const Strings kSongWordsB = {"Dreams", "Road", "Heart", "Skyline", "Rain", "Fire", "Echoes", "River",
                             "Lights", "Waves", "Horizon", "Gardens"};
const std::map<std::string, Strings> kArtistsByGenre = {
    {"Pop", {"Luna Vale", "The Brightsides", "Kira Moon"}},
    {"Rock", {"Iron Harbor", "The Static Kings", "Red Canyon"}},
    {"Jazz", {"Miles Carter Trio", "Ella Rivers", "Blue Note Quartet"}},
    {"Classical", {"Vienna Strings", "Clara Hoffmann", "Aurora Philharmonic"}},
    {"Hip Hop", {"MC Prism", "Lyric Jones", "Northside Crew"}},
    {"Country", {"Dusty Rhodes", "Maple Creek", "Savannah Lane"}},
    {"Electronic", {"Pulse Theory", "Nova Drift", "Circuit Bloom"}},
    {"Indie", {"Paper Lanterns", "Fox and Fern", "The Low Tides"}}};

enum class Kind {
  // calendar
  kLesson, kMeeting, kMatch, kDinner, kAppointment,
  // reminders
  kClass, kBuy, kCallReminder, kPayBill, kBookCourt,
  // notes
  kDietPlan, kTripPlan, kPracticePlan, kIdeas, kReadingList,
  // mail
  kInvoice, kUpdate, kItinerary, kNewsletter,
  // music
  kSong,
  // google
  kRestaurantSearch, kHowTo, kTickets, kWeather, kFlights,
  // phonecall
  kCall, kMissedCall,
};

AppId kind_app(Kind k) {
  switch (k) {
    case Kind::kLesson: case Kind::kMeeting: case Kind::kMatch: case Kind::kDinner:
    case Kind::kAppointment:
      return AppId::kCalendar;
    case Kind::kClass: case Kind::kBuy: case Kind::kCallReminder: case Kind::kPayBill:
    case Kind::kBookCourt:
      return AppId::kReminders;
    case Kind::kDietPlan: case Kind::kTripPlan: case Kind::kPracticePlan: case Kind::kIdeas:
    case Kind::kReadingList:
      return AppId::kNotes;
    case Kind::kInvoice: case Kind::kUpdate: case Kind::kItinerary: case Kind::kNewsletter:
      return AppId::kMail;
    case Kind::kSong:
      return AppId::kMusic;
    case Kind::kRestaurantSearch: case Kind::kHowTo: case Kind::kTickets: case Kind::kWeather:
    case Kind::kFlights:
      return AppId::kGoogle;
    case Kind::kCall: case Kind::kMissedCall:
      return AppId::kPhonecall;
  }
  return AppId::kMail;
}

const std::map<AppId, std::vector<Kind>>& filler_kinds() {
  static const std::map<AppId, std::vector<Kind>> kinds = {
      {AppId::kCalendar, {Kind::kLesson, Kind::kMeeting, Kind::kMatch, Kind::kDinner, Kind::kAppointment}},
      {AppId::kReminders, {Kind::kClass, Kind::kBuy, Kind::kCallReminder, Kind::kPayBill, Kind::kBookCourt}},
      {AppId::kNotes, {Kind::kDietPlan, Kind::kTripPlan, Kind::kPracticePlan, Kind::kIdeas, Kind::kReadingList}},
      {AppId::kMail, {Kind::kInvoice, Kind::kUpdate, Kind::kItinerary, Kind::kNewsletter}},
      {AppId::kMusic, {Kind::kSong}},
      {AppId::kGoogle, {Kind::kRestaurantSearch, Kind::kHowTo, Kind::kTickets, Kind::kWeather, Kind::kFlights}},
      {AppId::kPhonecall, {Kind::kCall, Kind::kMissedCall}},
  };
  return kinds;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string fill(const std::string& tmpl, const Slots& slots) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      const std::string key = tmpl.substr(i + 1, close - i - 1);
      auto it = slots.find(key);
      if (it == slots.end()) throw std::logic_error("template slot '" + key + "' unset in: " + tmpl);
      out += it->second;
      i = close + 1;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

// Everything about a persona that templates draw on.
struct PersonaContext {
  std::string name;
  Strings hobbies, contacts, projects, companies, cities, cuisines, sports;
  std::string genre, home_city;
};

struct Draft {
  AppId app;
  std::string title, body;
  std::map<std::string, std::string> tags;
  Slots slots;
  Timestamp timestamp{};
  std::int64_t access_count = 0;
};

std::string first_name(const std::string& full) { return full.substr(0, full.find(' ')); }

std::string phone_number(Rng& rng) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "+1-555-%03zu-%04zu", 100 + rng.below(900), rng.below(10000));
  return buf;
}

// Picks `key` from `force` when present so linked items share the anchor's topic.
std::string choose(const Slots& force, const std::string& key, const Strings& options, Rng& rng) {
  auto it = force.find(key);
  return it != force.end() ? it->second : rng.pick(options);
}

Draft make_item(Kind kind, const PersonaContext& pc, Rng& rng, const Slots& force) {
  Draft d;
  d.app = kind_app(kind);
  auto& s = d.slots;
  switch (kind) {
    case Kind::kLesson: {
      s["hobby"] = choose(force, "hobby", pc.hobbies, rng);
      const std::string teacher = rng.pick(pc.contacts);
      d.title = s["hobby"] + " Lesson";
      d.body = "Calendar event at " + s["hobby"] + " Studio with " + teacher;
      d.tags = {{"location", s["hobby"] + " Studio"}, {"organizer", teacher}, {"attendee", teacher}};
      break;
    }
    case Kind::kMeeting: {
      s["project"] = choose(force, "project", pc.projects, rng);
      s["contact"] = choose(force, "contact", pc.contacts, rng);
      d.title = s["project"] + " " + rng.pick(kMeetingKinds);
      const std::string room = std::string("Conference Room ") + static_cast<char>('A' + rng.below(6));
      d.body = "Calendar event in " + room + " organized by " + s["contact"];
      d.tags = {{"location", room}, {"organizer", s["contact"]}, {"attendee", s["contact"]}};
      break;
    }
    case Kind::kMatch: {
      s["sport"] = choose(force, "sport", pc.sports, rng);
      d.title = s["sport"] + " Match";
      d.body = "Calendar event at the " + pc.home_city + " Sports Center";
      d.tags = {{"location", pc.home_city + " Sports Center"}};
      break;
    }
    case Kind::kDinner: {
      s["cuisine"] = choose(force, "cuisine", pc.cuisines, rng);
      s["contact"] = rng.pick(pc.contacts);
      d.title = "Dinner with " + first_name(s["contact"]);
      d.body = "Calendar event at " + s["cuisine"] + " Bistro with " + s["contact"];
      d.tags = {{"location", s["cuisine"] + " Bistro"}, {"attendee", s["contact"]}};
      break;
    }
    case Kind::kAppointment: {
      s["appt"] = choose(force, "appt", kAppointments, rng);
      d.title = s["appt"] + " Appointment";
      d.body = "Calendar event at the " + s["appt"] + " office";
      d.tags = {{"location", s["appt"] + " Office"}};
      break;
    }
    case Kind::kClass: {
      s["hobby"] = choose(force, "hobby", pc.hobbies, rng);
      d.title = s["hobby"] + " Class";
      d.body = "Reminder in the Personal list";
      d.tags = {{"list", "Personal"}, {"priority", rng.chance(0.5) ? "high" : "medium"}};
      break;
    }
    case Kind::kBuy: {
      d.title = "Buy " + rng.pick(kGroceries);
      d.body = "Reminder in the Groceries list";
      d.tags = {{"list", "Groceries"}, {"priority", "low"}};
      break;
    }
    case Kind::kCallReminder: {
      s["contact"] = choose(force, "contact", pc.contacts, rng);
      d.title = "Call " + first_name(s["contact"]);
      d.body = "Reminder in the Personal list";
      d.tags = {{"list", "Personal"}, {"priority", "medium"}};
      break;
    }
    case Kind::kPayBill: {
      s["company"] = choose(force, "company", pc.companies, rng);
      d.title = "Pay " + s["company"] + " Bill";
      d.body = "Reminder in the Bills list";
      d.tags = {{"list", "Bills"}, {"priority", "high"}};
      break;
    }
    case Kind::kBookCourt: {
      s["sport"] = choose(force, "sport", pc.sports, rng);
      d.title = "Book " + s["sport"] + " Court";
      d.body = "Reminder in the Sports list";
      d.tags = {{"list", "Sports"}, {"priority", "low"}};
      break;
    }
    case Kind::kDietPlan: {
      s["diet"] = choose(force, "diet", kDiets, rng);
      d.title = s["diet"] + " Plan";
      d.body = "Note in the Health folder: meals and snacks for the week";
      d.tags = {{"folder", "Health"}, {"content", "meals and snacks for the week"}};
      break;
    }
    case Kind::kTripPlan: {
      s["city"] = choose(force, "city", pc.cities, rng);
      d.title = "Trip to " + s["city"] + " Plan";
      d.body = "Note in the Travel folder: hotel, museums and places to visit";
      d.tags = {{"folder", "Travel"}, {"content", "hotel, museums and places to visit"}};
      break;
    }
    case Kind::kPracticePlan: {
      s["hobby"] = choose(force, "hobby", pc.hobbies, rng);
      d.title = s["hobby"] + " Practice Plan";
      d.body = "Note in the Hobbies folder: exercises for every evening";
      d.tags = {{"folder", "Hobbies"}, {"content", "exercises for every evening"}};
      break;
    }
    case Kind::kIdeas: {
      s["project"] = choose(force, "project", pc.projects, rng);
      d.title = s["project"] + " Ideas";
      d.body = "Note in the Work folder: open questions and next steps";
      d.tags = {{"folder", "Work"}, {"content", "open questions and next steps"}};
      break;
    }
    case Kind::kReadingList: {
      d.title = "Reading List";
      d.body = "Note in the Personal folder: novels to borrow from the library";
      d.tags = {{"folder", "Personal"}, {"content", "novels to borrow from the library"}};
      break;
    }
    case Kind::kInvoice: {
      s["company"] = choose(force, "company", pc.companies, rng);
      d.title = "Invoice from " + s["company"];
      d.body = "Email from " + s["company"] + " Billing: your monthly statement is ready";
      d.tags = {{"sender", s["company"] + " Billing"}, {"subject", d.title}};
      break;
    }
    case Kind::kUpdate: {
      s["project"] = choose(force, "project", pc.projects, rng);
      s["contact"] = choose(force, "contact", pc.contacts, rng);
      d.title = s["project"] + " Update";
      d.body = "Email from " + s["contact"] + ": status and action items";
      d.tags = {{"sender", s["contact"]}, {"subject", d.title}};
      break;
    }
    case Kind::kItinerary: {
      s["city"] = choose(force, "city", pc.cities, rng);
      d.title = "Your Flight to " + s["city"];
      d.body = "Email from the Travel Desk: itinerary and boarding pass";
      d.tags = {{"sender", "Travel Desk"}, {"subject", d.title}};
      break;
    }
    case Kind::kNewsletter: {
      s["hobby"] = choose(force, "hobby", pc.hobbies, rng);
      d.title = s["hobby"] + " Weekly Newsletter";
      d.body = "Email from the " + s["hobby"] + " Club: events and tips";
      d.tags = {{"sender", s["hobby"] + " Club"}, {"subject", d.title}};
      break;
    }
    case Kind::kSong: {
      s["genre"] = force.count("genre") ? force.at("genre") : (rng.chance(0.7) ? pc.genre : rng.pick(kGenres));
      s["artist"] = choose(force, "artist", kArtistsByGenre.at(s["genre"]), rng);
      const std::string song = rng.pick(kSongWordsA) + " " + rng.pick(kSongWordsB);
      const std::string album = rng.pick(kSongWordsB) + " of " + rng.pick(kSongWordsA);
      d.title = song + " by " + s["artist"];
      d.body = "Song played in Music from the album " + album + ", " + s["genre"];
      d.tags = {{"song_name", song}, {"artist", s["artist"]}, {"album_title", album}, {"genre", s["genre"]}};
      break;
    }
    case Kind::kRestaurantSearch: {
      s["cuisine"] = choose(force, "cuisine", pc.cuisines, rng);
      d.title = "best " + lower(s["cuisine"]) + " restaurants in " + pc.home_city;
      d.body = "Google search history entry";
      d.tags = {{"search_query", d.title}, {"cuisine", s["cuisine"]}, {"location", pc.home_city}};
      break;
    }
    case Kind::kHowTo: {
      s["hobby"] = choose(force, "hobby", pc.hobbies, rng);
      d.title = rng.chance(0.5) ? "how to get better at " + lower(s["hobby"])
                                : lower(s["hobby"]) + " tutorial for beginners";
      d.body = "Google search history entry";
      d.tags = {{"search_query", d.title}};
      break;
    }
    case Kind::kTickets: {
      s["sport"] = choose(force, "sport", pc.sports, rng);
      d.title = lower(s["sport"]) + " tickets this weekend";
      d.body = "Google search history entry";
      d.tags = {{"search_query", d.title}};
      break;
    }
    case Kind::kWeather: {
      s["city"] = choose(force, "city", pc.cities, rng);
      d.title = "weather in " + s["city"];
      d.body = "Google search history entry";
      d.tags = {{"search_query", d.title}, {"location", s["city"]}};
      break;
    }
    case Kind::kFlights: {
      s["city"] = choose(force, "city", pc.cities, rng);
      d.title = "cheap flights to " + s["city"];
      d.body = "Google search history entry";
      d.tags = {{"search_query", d.title}, {"destination", s["city"]}};
      break;
    }
    case Kind::kCall:
    case Kind::kMissedCall: {
      s["contact"] = choose(force, "contact", pc.contacts, rng);
      const bool missed = kind == Kind::kMissedCall;
      d.title = (missed ? "Missed Call from " : "Call with ") + s["contact"];
      const std::string direction = missed ? "missed" : (rng.chance(0.5) ? "incoming" : "outgoing");
      const std::string minutes = missed ? "0" : std::to_string(1 + rng.below(40));
      d.body = missed ? "Phone call from " + s["contact"] + " was not answered"
                      : "Phone call " + direction + " with " + s["contact"] + ", " + minutes + " minutes";
      d.tags = {{"contact", s["contact"]}, {"phone_number", phone_number(rng)},
                {"direction", direction}, {"duration", minutes}};
      break;
    }
  }
  if (s.count("contact")) s["first"] = first_name(s["contact"]);
  if (s.count("hobby")) s["hobby_l"] = lower(s["hobby"]);
  if (s.count("sport")) s["sport_l"] = lower(s["sport"]);
  if (s.count("appt")) s["appt_l"] = lower(s["appt"]);
  if (s.count("diet")) s["diet_l"] = lower(s["diet"]);
  if (s.count("cuisine")) s["cuisine_l"] = s["cuisine"];
  return d;
}

struct Link {
  Kind kind;
  double probability;
  Strings shared_slots;
};

// An implicit-query family: what the user asks, which item answers it, and the labels.
// Query wording comes in three registers: `named` mentions the item's distinguishing slot,
// `reworded` uses other forms of the item's own words (lessons, billed, flying), and
// `implicit` shares no vocabulary with the item at all.
struct Intent {
  Kind anchor;
  std::string api;
  Strings gold_tools;
  Strings named;
  Strings reworded;
  Strings implicit;
  std::vector<Link> links;
};

const std::vector<Intent>& intents() {
  static const std::vector<Intent> all = {
      // calendar
      {Kind::kLesson, "get_event_details", {"get_event_details", "get_upcoming_events", "get_reminder"},
       {"When is my next {hobby_l} lesson?", "Do I have {hobby_l} lessons coming up?"},
       {"Do I have any lessons scheduled?", "What time are my lessons this week?"},
       {"Am I free this evening?", "What am I doing after work today?"},
       {{Kind::kClass, 0.4, {"hobby"}}}},
      {Kind::kMeeting, "get_event_details", {"get_event_details", "send_email", "get_upcoming_events"},
       {"When do we talk about {project}?", "Is {first} still meeting me today?"},
       {"Who organizes my meetings today?", "Which conferencing rooms am I booked into?"},
       {"I'm running late.", "Looks like I won't make it on time.", "Traffic is terrible, I'll be late."},
       {{Kind::kUpdate, 0.5, {"project", "contact"}}}},
      {Kind::kMatch, "get_event_details", {"get_event_details", "get_upcoming_events", "web_search"},
       {"What time does the {sport_l} match start?"},
       {"Are there any matches coming up?", "When are the matches this week?"},
       {"Should I pack my gym bag tonight?", "Am I playing this weekend?"},
       {{Kind::kTickets, 0.4, {"sport"}}}},
      {Kind::kDinner, "get_event_details", {"get_event_details", "get_directions", "find_restaurants"},
       {"What time is dinner with {first}?"},
       {"Where are we dining tonight?", "Any dinners planned this week?"},
       {"Where are we eating tonight?", "Do I need to book a table?"},
       {{Kind::kRestaurantSearch, 0.4, {"cuisine"}}}},
      {Kind::kAppointment, "get_event_details", {"get_event_details", "update_event", "create_reminder"},
       {"When do I see the {appt_l}?"},
       {"When are my appointments?", "Do I have any appointments coming up?"},
       {"Do I need to leave work early this week?"},
       {}},
      // reminders
      {Kind::kClass, "get_reminder", {"get_reminder", "list_reminders", "get_event_details"},
       {"Don't let me forget about {hobby_l} class."},
       {"When are my classes again?", "Remind me about my classes."},
       {"What was I supposed to sign up for?"},
       {{Kind::kLesson, 0.4, {"hobby"}}}},
      {Kind::kBuy, "list_reminders", {"list_reminders", "get_reminder", "create_reminder"},
       {},
       {"What am I buying at the grocery store?", "Which grocery items are on my lists?"},
       {"What do I need to pick up at the store?", "Anything I have to grab on the way home?"},
       {}},
      {Kind::kCallReminder, "get_reminder", {"get_reminder", "call_contact", "list_reminders"},
       {"Don't let me forget to ring {first}."},
       {"Who am I calling back today?", "Which calls did I put on my lists?"},
       {"Who did I promise to get back to?"},
       {{Kind::kMissedCall, 0.4, {"contact"}}}},
      {Kind::kPayBill, "get_reminder", {"get_reminder", "complete_reminder", "read_email"},
       {"Did I pay {company} yet?"},
       {"When are my bills due?", "Any payments coming due soon?"},
       {"Am I behind on anything I owe?"},
       {{Kind::kInvoice, 0.5, {"company"}}}},
      // notes
      {Kind::kDietPlan, "read_note", {"read_note", "search_notes", "list_notes"},
       {"I need to check my {diet_l} plan again."},
       {"What meal plans did I write down?", "Pull up my eating plans."},
       {"What should I have for lunch?"},
       {}},
      {Kind::kTripPlan, "read_note", {"read_note", "search_flights", "read_email"},
       {"What did I plan for {city}?", "Show me what I wanted to see in {city}."},
       {"Show me my travelling notes.", "Which museum did I want to see?"},
       {"Where am I staying on holiday?"},
       {{Kind::kItinerary, 0.4, {"city"}}}},
      {Kind::kPracticePlan, "read_note", {"read_note", "update_note", "search_notes"},
       {"How should I practice {hobby_l} tonight?"},
       {"What exercise routine did I write for practicing?"},
       {"What should I work on tonight?"},
       {}},
      {Kind::kIdeas, "read_note", {"read_note", "search_notes", "share_note"},
       {"What ideas did I have for {project}?"},
       {"What was my idea for the next step?", "Any questioning notes I left myself?"},
       {"What was I thinking for that project?"},
       {}},
      // mail
      {Kind::kInvoice, "read_email", {"read_email", "search_emails", "get_reminder"},
       {"Did the {company} invoice arrive?"},
       {"How much was billed this month?", "Any invoices in my inbox?"},
       {"How much do I owe?"},
       {{Kind::kPayBill, 0.4, {"company"}}}},
      {Kind::kUpdate, "read_email", {"read_email", "reply_email", "get_event_details"},
       {"What's the latest on {project}?"},
       {"Any updates from the team?", "What are the actions I owe?"},
       {"Did I miss anything at work?"},
       {{Kind::kMeeting, 0.4, {"project", "contact"}}}},
      {Kind::kItinerary, "read_email", {"read_email", "search_flights", "get_event_details"},
       {"When does my flight to {city} leave?"},
       {"When am I flying out?", "Where are my boarding passes?"},
       {"When do I need to leave for the airport?"},
       {{Kind::kTripPlan, 0.4, {"city"}}}},
      // music
      {Kind::kSong, "play_song", {"play_song", "get_recently_played", "like_song"},
       {},
       {"Play the songs I was playing earlier."},
       {"Put on the tune I had on repeat.", "I want to hear my favourite track again."},
       {}},
      {Kind::kSong, "play_artist", {"play_artist", "play_song", "play_album"},
       {"Play something by {artist}.", "I'm in the mood for {artist}."},
       {},
       {"Put on my favourite band."},
       {}},
      {Kind::kSong, "play_genre", {"play_genre", "play_song", "create_playlist"},
       {"Put on some {genre} for me.", "I feel like listening to {genre}."},
       {},
       {"Play something to relax."},
       {}},
      // google
      {Kind::kRestaurantSearch, "find_restaurants", {"find_restaurants", "get_directions", "web_search"},
       {"Find that {cuisine_l} restaurant again."},
       {"Where was that restaurant I was searching?"},
       {"Where should we go out to eat?"},
       {{Kind::kDinner, 0.4, {"cuisine"}}}},
      {Kind::kHowTo, "open_search_result", {"open_search_result", "web_search", "get_search_history"},
       {"What was that {hobby_l} tutorial I found?"},
       {"Show me those tutorials again.", "What was I searching to get better?"},
       {"Where were those tips I was reading?"},
       {}},
      {Kind::kWeather, "get_weather", {"get_weather", "web_search", "search_flights"},
       {"Is it going to rain in {city}?"},
       {"What's the weathers looking like where I'm headed?"},
       {"Will I need an umbrella?"},
       {}},
      {Kind::kTickets, "web_search", {"web_search", "get_search_history", "get_event_details"},
       {"Did I find {sport_l} tickets?"},
       {"How much was the ticket I searched?"},
       {"How much were the seats?"},
       {{Kind::kMatch, 0.4, {"sport"}}}},
      // phonecall
      {Kind::kMissedCall, "get_missed_calls", {"get_missed_calls", "call_back", "get_recent_calls"},
       {"Did {first} try to reach me?"},
       {"Who called me earlier?", "Any calls I didn't answer?"},
       {"Who tried to reach me earlier?", "Did anyone try to get hold of me?"},
       {{Kind::kCallReminder, 0.3, {"contact"}}}},
      {Kind::kCall, "call_back", {"call_back", "call_contact", "send_email"},
       {"Ring {first} back.", "I should get back to {first}."},
       {"Who was I calling this morning?"},
       {"I should return that conversation from earlier."},
       {}},
  };
  return all;
}

// Register shares for query wording: named, reworded, implicit.
constexpr std::array<double, 3> kRegisterWeights = {0.3, 0.4, 0.3};

const std::string& pick_template(const Intent& intent, Rng& rng) {
  const std::array<const Strings*, 3> lists = {&intent.named, &intent.reworded, &intent.implicit};
  double mass = 0.0;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (!lists[i]->empty()) mass += kRegisterWeights[i];
  }
  double r = rng.uniform() * mass;
  const Strings* chosen = nullptr;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (lists[i]->empty()) continue;
    chosen = lists[i];
    r -= kRegisterWeights[i];
    if (r < 0.0) break;
  }
  return rng.pick(*chosen);
}

Plan gold_plan_for(const Intent& intent, const Draft& anchor, const std::vector<Tool>& toolbox) {
  const auto it = std::find_if(toolbox.begin(), toolbox.end(),
                               [&](const Tool& t) { return t.name == intent.api; });
  if (it == toolbox.end()) throw std::logic_error("intent api missing from toolbox: " + intent.api);
  Plan plan{intent.api, {}, false};
  for (const auto& param : it->params) {
    if (!param.required) continue;
    if (param.name == "title") {
      plan.args[param.name] = anchor.title;
      continue;
    }
    auto tag = anchor.tags.find(param.name);
    if (tag == anchor.tags.end()) {
      throw std::logic_error("anchor cannot fill param " + param.name + " of " + intent.api);
    }
    plan.args[param.name] = tag->second;
  }
  return plan;
}

Persona make_persona(const std::string& id, Rng& rng, PersonaContext& pc) {
  Persona p;
  p.id = id;
  const std::string first = rng.pick(kFirstNames);
  pc.name = first + " " + rng.pick(kLastNames);
  pc.hobbies = rng.sample(kHobbies, 3);
  pc.cuisines = rng.sample(kCuisines, 2);
  pc.sports = rng.sample(kSports, 2);
  pc.cities = rng.sample(kCities, 3);
  pc.home_city = pc.cities.back();
  pc.cities.pop_back();
  pc.projects = rng.sample(kProjects, 2);
  pc.companies = rng.sample(kCompanies, 2);
  pc.genre = rng.pick(kGenres);
  Strings firsts;
  for (const auto& f : kFirstNames) {
    if (f != first) firsts.push_back(f);
  }
  firsts = rng.sample(firsts, 5);
  for (const auto& f : firsts) pc.contacts.push_back(f + " " + rng.pick(kLastNames));

  p.attributes = {{"name", pc.name},
                  {"age", std::to_string(18 + rng.below(53))},
                  {"profession", rng.pick(kProfessions)},
                  {"favorite_music_genre", pc.genre},
                  {"favorite_movie_genre", rng.pick(kMovieGenres)},
                  {"favorite_cuisine", pc.cuisines[0]},
                  {"favorite_sport", pc.sports[0]},
                  {"hobbies", pc.hobbies[0] + ", " + pc.hobbies[1] + ", " + pc.hobbies[2]},
                  {"home_city", pc.home_city}};

  std::array<double, kNumApps> raw{};
  double sum = 0.0;
  for (auto& w : raw) {
    w = rng.exponential();
    sum += w;
  }
  for (AppId app : kAllApps) p.app_usage_profile[app] = raw[app_index(app)] / sum;
  return p;
}

std::string zero_pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

double target_mean_items(AppId app) {
  switch (app) {
    case AppId::kMail: return 2.93;
    case AppId::kCalendar: return 5.63;
    case AppId::kGoogle: return 9.57;
    case AppId::kNotes: return 2.23;
    case AppId::kMusic: return 4.38;
    case AppId::kReminders: return 4.81;
    case AppId::kPhonecall: return 2.34;
  }
  return 0.0;
}

Corpus generate_corpus(const GeneratorConfig& config) {
  if (config.n_personas < 1) throw ConfigError("n_personas must be >= 1");
  if (config.window_days < 1) throw ConfigError("context window must span at least one day");

  using std::chrono::duration_cast;
  using std::chrono::seconds;
  const Timestamp window_end = config.epoch_start;
  const Timestamp window_start = window_end - std::chrono::days{config.window_days};
  const double window_secs = static_cast<double>((window_end - window_start).count());
  auto clamp_ts = [&](Timestamp t) { return std::clamp(t, window_start, window_end); };

  Rng rng(config.seed);
  Corpus corpus;
  corpus.toolbox = default_toolbox();

  const auto n = static_cast<std::size_t>(config.n_personas);
  const auto total_queries = static_cast<std::size_t>(std::llround(kQueriesPerPersona * static_cast<double>(n)));
  const std::size_t base_queries = total_queries / n;
  std::vector<std::size_t> query_budget(n, base_queries);
  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t i = 0; i < total_queries - base_queries * n; ++i) ++query_budget[order[i]];
  }

  const std::size_t persona_width = std::max<std::size_t>(4, std::to_string(n).size());
  std::size_t query_counter = 0;

  for (std::size_t pi = 0; pi < n; ++pi) {
    PersonaContext pc;
    Persona persona = make_persona("p" + zero_pad(pi + 1, persona_width), rng, pc);

    std::array<int, kNumApps> slots_left{};
    for (AppId app : kAllApps) slots_left[app_index(app)] = std::max(1, rng.poisson(target_mean_items(app)));

    std::vector<Draft> drafts;
    struct PendingQuery {
      const Intent* intent;
      std::size_t anchor;
      std::vector<std::size_t> gold;
      Timestamp when;
      std::string text;
    };
    std::vector<PendingQuery> pending;

    for (std::size_t qi = 0; qi < query_budget[pi]; ++qi) {
      // habitual apps are asked about more often
      double mass = 0.0;
      for (AppId app : kAllApps) {
        if (slots_left[app_index(app)] > 0) mass += persona.usage_weight(app);
      }
      if (mass <= 0.0) break;
      double r = rng.uniform() * mass;
      AppId app = AppId::kMail;
      for (AppId a : kAllApps) {
        if (slots_left[app_index(a)] <= 0) continue;
        app = a;
        r -= persona.usage_weight(a);
        if (r < 0.0) break;
      }
      std::vector<const Intent*> candidates;
      for (const auto& intent : intents()) {
        if (kind_app(intent.anchor) == app) candidates.push_back(&intent);
      }
      const Intent& intent = *rng.pick(candidates);

      const Timestamp asked = window_end - seconds{static_cast<std::int64_t>(rng.uniform() * 20 * 3600)};
      Draft anchor = make_item(intent.anchor, pc, rng, {});
      if (rng.chance(0.15)) {
        // an old, rarely touched item: habit signals give no help here
        anchor.timestamp = window_start + seconds{static_cast<std::int64_t>(rng.uniform() * window_secs)};
        anchor.access_count = rng.poisson(2.0);
      } else {
        const double u = rng.uniform();
        const int days_back = u < 0.35 ? 0 : u < 0.65 ? 1 : u < 0.85 ? 2 : 3;
        const auto jitter = static_cast<std::int64_t>((rng.uniform() - 0.5) * 3 * 3600);
        anchor.timestamp = clamp_ts(asked - std::chrono::days{days_back} + seconds{jitter});
        anchor.access_count = 2 + rng.poisson(4.0);
      }
      --slots_left[app_index(app)];

      PendingQuery q{&intent, drafts.size(), {drafts.size()}, asked, fill(pick_template(intent, rng), anchor.slots)};
      drafts.push_back(anchor);

      for (const auto& link : intent.links) {
        const AppId link_app = kind_app(link.kind);
        if (slots_left[app_index(link_app)] <= 0 || !rng.chance(link.probability)) continue;
        Slots force;
        for (const auto& key : link.shared_slots) force[key] = drafts[q.anchor].slots.at(key);
        Draft linked = make_item(link.kind, pc, rng, force);
        const auto offset = static_cast<std::int64_t>((rng.uniform() - 0.5) * 72 * 3600);
        linked.timestamp = clamp_ts(drafts[q.anchor].timestamp + seconds{offset});
        linked.access_count = 1 + rng.poisson(3.0);
        --slots_left[app_index(link_app)];
        q.gold.push_back(drafts.size());
        drafts.push_back(std::move(linked));
      }
      pending.push_back(std::move(q));
    }

    // filler to reach each store's drawn size
    std::set<std::pair<AppId, std::string>> titles;
    for (const auto& d : drafts) titles.emplace(d.app, d.title);
    for (AppId app : kAllApps) {
      const auto& kinds = filler_kinds().at(app);
      for (; slots_left[app_index(app)] > 0; --slots_left[app_index(app)]) {
        Draft d = make_item(rng.pick(kinds), pc, rng, {});
        for (int attempt = 0; attempt < 8 && titles.count({app, d.title}); ++attempt) {
          d = make_item(rng.pick(kinds), pc, rng, {});
        }
        titles.emplace(app, d.title);
        d.timestamp = window_start + seconds{static_cast<std::int64_t>(rng.uniform() * window_secs)};
        d.access_count = rng.poisson(1.0 + 4.0 * persona.usage_weight(app));
        drafts.push_back(std::move(d));
      }
    }

    // opaque ids: a random permutation so ids carry no label information
    std::vector<std::size_t> perm(drafts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i + 1;
    rng.shuffle(perm);
    const std::size_t id_width = std::max<std::size_t>(2, std::to_string(drafts.size()).size());
    std::vector<std::string> ids(drafts.size());
    for (std::size_t i = 0; i < drafts.size(); ++i) ids[i] = persona.id + "-i" + zero_pad(perm[i], id_width);

    std::array<std::vector<ContextItem>, kNumApps> by_app;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      auto& d = drafts[i];
      ContextItem item;
      item.id = ids[i];
      item.app = d.app;
      item.title = d.title;
      item.body = d.body;
      item.timestamp = d.timestamp;
      item.categorical_tags = d.tags;
      item.categorical_tags["date"] = format_date(d.timestamp);
      if (d.app == AppId::kReminders) item.categorical_tags["due_date"] = format_date(d.timestamp);
      item.access_count = d.access_count;
      by_app[app_index(d.app)].push_back(std::move(item));
    }
    for (AppId app : kAllApps) {
      auto& items = by_app[app_index(app)];
      std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      corpus.stores.push_back({persona.id, app, std::move(items)});
    }

    for (auto& pq : pending) {
      LabeledQuery q;
      q.id = "q" + zero_pad(++query_counter, 5);
      q.persona_id = persona.id;
      q.text = pq.text;
      q.timestamp = pq.when;
      for (std::size_t g : pq.gold) q.gold_context_ids.push_back(ids[g]);
      q.gold_tools = pq.intent->gold_tools;
      q.gold_plan = gold_plan_for(*pq.intent, drafts[pq.anchor], corpus.toolbox);
      corpus.queries.push_back(std::move(q));
    }
    corpus.personas.push_back(std::move(persona));
  }

  // exact split sizes, chosen by a seeded shuffle
  const auto n_test = static_cast<std::size_t>(std::llround(kTestFraction * static_cast<double>(corpus.queries.size())));
  std::vector<std::size_t> order(corpus.queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    corpus.queries[order[i]].split = i < n_test ? Split::kTest : Split::kTrain;
  }
  return corpus;
}

}  // namespace ctrag
