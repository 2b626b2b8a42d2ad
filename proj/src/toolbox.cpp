#include "ctrag/corpus.hpp"

namespace ctrag {

namespace {

struct ToolSpec {
  const char* name;
  AppId app;
  const char* purpose;
  std::vector<ToolParam> params;
};

std::string display_name(AppId app) {
  switch (app) {
    case AppId::kMail: return "Mail";
    case AppId::kCalendar: return "Calendar";
    case AppId::kGoogle: return "Google";
    case AppId::kMusic: return "Music";
    case AppId::kReminders: return "Reminders";
    case AppId::kNotes: return "Notes";
    case AppId::kPhonecall: return "PhoneCall";
  }
  return "";
}

ToolParam req(const char* name, const char* desc) { return {name, desc, true}; }
ToolParam opt(const char* name, const char* desc) { return {name, desc, false}; }

}  // namespace

std::vector<Tool> default_toolbox() {
  using A = AppId;
  const std::vector<ToolSpec> specs = {
      // music (11)
      {"play_song", A::kMusic, "play a particular song from the music library",
       {req("song_name", "name of the song to play")}},
      {"pause_playback", A::kMusic, "pause the song that is currently playing", {}},
      {"resume_playback", A::kMusic, "resume playback of the paused song", {}},
      {"skip_track", A::kMusic, "skip to the next track in the queue", {}},
      {"play_artist", A::kMusic, "play songs by a particular artist",
       {req("artist", "artist whose songs should be played")}},
      {"play_album", A::kMusic, "play every track of an album",
       {req("album_title", "title of the album")}},
      {"play_genre", A::kMusic, "play songs of a music genre such as jazz or pop",
       {req("genre", "music genre to play")}},
      {"add_to_playlist", A::kMusic, "add a song to a playlist",
       {req("song_name", "song to add"), req("playlist_name", "playlist to add the song to")}},
      {"create_playlist", A::kMusic, "create a new playlist of songs",
       {req("playlist_name", "name of the new playlist")}},
      {"get_recently_played", A::kMusic, "list the songs that were played recently", {}},
      {"like_song", A::kMusic, "mark a song as a favourite",
       {req("song_name", "song to mark as favourite")}},
      // google (10)
      {"web_search", A::kGoogle, "search the web for a query and show the results",
       {req("search_query", "text to search for")}},
      {"image_search", A::kGoogle, "search the web for images matching a query",
       {req("search_query", "text describing the images")}},
      {"search_news", A::kGoogle, "find news articles about a topic", {req("topic", "news topic")}},
      {"get_weather", A::kGoogle, "get the weather forecast, rain and temperature for a location",
       {req("location", "city or place for the forecast")}},
      {"find_restaurants", A::kGoogle, "find restaurants and places to eat that serve a cuisine near a location",
       {req("cuisine", "type of food"), req("location", "where to search")}},
      {"get_directions", A::kGoogle, "get directions and travel time to a destination",
       {req("destination", "place to navigate to")}},
      {"search_flights", A::kGoogle, "search for flights to a destination",
       {req("destination", "arrival city"), opt("date", "departure date")}},
      {"get_search_history", A::kGoogle, "list the recent searches from the search history", {}},
      {"open_search_result", A::kGoogle, "open a page found by an earlier search again, such as a tutorial or article",
       {req("search_query", "the earlier search text")}},
      {"translate_text", A::kGoogle, "translate text into another language",
       {req("text", "text to translate"), req("target_language", "language to translate into")}},
      // notes (9)
      {"create_note", A::kNotes, "create a new note with a title and content",
       {req("title", "title of the note"), req("content", "text of the note")}},
      {"read_note", A::kNotes, "open and read a note such as a plan or a list",
       {req("title", "title of the note to read")}},
      {"update_note", A::kNotes, "change the content of an existing note",
       {req("title", "title of the note"), req("content", "new text")}},
      {"delete_note", A::kNotes, "delete a note", {req("title", "title of the note to delete")}},
      {"search_notes", A::kNotes, "search notes for a keyword", {req("keyword", "word to look for")}},
      {"list_notes", A::kNotes, "list all notes in a folder", {opt("folder", "folder to list")}},
      {"pin_note", A::kNotes, "pin a note to the top of the list", {req("title", "title of the note")}},
      {"share_note", A::kNotes, "share a note with a contact",
       {req("title", "title of the note"), req("contact", "contact to share with")}},
      {"move_note", A::kNotes, "move a note into another folder",
       {req("title", "title of the note"), req("folder", "destination folder")}},
      // mail (8)
      {"send_email", A::kMail, "send an email message to a recipient",
       {req("recipient", "email address or contact"), req("subject", "subject line"),
        opt("body", "message text")}},
      {"read_email", A::kMail, "open and read an email from the inbox, such as a bill, an update or an itinerary",
       {req("subject", "subject of the email")}},
      {"reply_email", A::kMail, "reply to an email", {req("subject", "subject of the email"), opt("body", "reply text")}},
      {"forward_email", A::kMail, "forward an email to a recipient",
       {req("subject", "subject of the email"), req("recipient", "who receives the forward")}},
      {"search_emails", A::kMail, "search the inbox for emails from a sender", {req("sender", "sender to look for")}},
      {"delete_email", A::kMail, "delete an email", {req("subject", "subject of the email")}},
      {"mark_email_read", A::kMail, "mark an email as read", {req("subject", "subject of the email")}},
      {"get_unread_emails", A::kMail, "list all unread emails in the inbox", {}},
      // phonecall (8)
      {"call_contact", A::kPhonecall, "place a phone call to a contact", {req("contact", "who to call")}},
      {"call_number", A::kPhonecall, "dial a phone number", {req("phone_number", "number to dial")}},
      {"get_recent_calls", A::kPhonecall, "list recent incoming and outgoing phone calls", {}},
      {"get_missed_calls", A::kPhonecall, "show who tried to reach you with a missed phone call", {}},
      {"call_back", A::kPhonecall, "call back a contact who rang you earlier", {req("contact", "who to call back")}},
      {"block_number", A::kPhonecall, "block calls from a phone number", {req("phone_number", "number to block")}},
      {"add_contact", A::kPhonecall, "save a new contact with a phone number",
       {req("contact", "contact name"), req("phone_number", "their number")}},
      {"delete_call_log", A::kPhonecall, "delete the call log for a contact", {req("contact", "contact name")}},
      // calendar (7)
      {"create_event", A::kCalendar, "schedule a new calendar event on a date",
       {req("title", "event title"), req("date", "event date")}},
      {"get_event_details", A::kCalendar, "find when an event such as a meeting, lesson, game, dinner or appointment is scheduled and show its time and details",
       {req("title", "title of the event")}},
      {"update_event", A::kCalendar, "move an existing event to another date",
       {req("title", "event title"), req("date", "new date")}},
      {"cancel_event", A::kCalendar, "cancel a scheduled event", {req("title", "event title")}},
      {"get_upcoming_events", A::kCalendar, "list upcoming events and meetings coming up on the schedule", {}},
      {"add_event_attendee", A::kCalendar, "invite an attendee to an event",
       {req("title", "event title"), req("attendee", "person to invite")}},
      {"get_events_on_date", A::kCalendar, "list the events scheduled on a date", {req("date", "date to check")}},
      // reminders (6)
      {"create_reminder", A::kReminders, "create a reminder that is due on a date",
       {req("title", "what to be reminded about"), req("due_date", "when the reminder is due")}},
      {"get_reminder", A::kReminders, "look up a reminder so you do not forget it and show when it is due",
       {req("title", "title of the reminder")}},
      {"complete_reminder", A::kReminders, "mark a reminder as done or paid", {req("title", "title of the reminder")}},
      {"delete_reminder", A::kReminders, "delete a reminder", {req("title", "title of the reminder")}},
      {"list_reminders", A::kReminders, "list open reminders and things you need to do or pick up", {}},
      {"snooze_reminder", A::kReminders, "snooze a reminder until later", {req("title", "title of the reminder")}},
  };

  std::vector<Tool> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    out.push_back({s.name, s.app,
                   display_name(s.app) + " App's " + s.name + " API is used to " + s.purpose,
                   s.params});
  }
  return out;
}

}  // namespace ctrag
