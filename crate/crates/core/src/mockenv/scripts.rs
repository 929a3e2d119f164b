//! Bundled app scripts: a contacts app, a messaging app and a settings
//! app, 13 tasks in total across easy/middle/hard tags.

use super::{AppScript, Checker, Difficulty, Mutation, Screen, TaskSpec, TransitionRule, Trigger};
use crate::actions::{Action, ActionName, Direction, TaskStatus};
use crate::geometry::{NormBox, NormPoint, ScreenDims};
use crate::protocol::SceneElement;

fn dims() -> ScreenDims {
    ScreenDims::new(1080, 2160).expect("static dims are valid")
}

fn el(id: &str, role: &str, label: &str, bounds: (u16, u16, u16, u16)) -> SceneElement {
    SceneElement {
        id: id.into(),
        role: role.into(),
        label: label.into(),
        bounds: NormBox::new(bounds.0, bounds.1, bounds.2, bounds.3).expect("static box is valid"),
        editable: false,
        text: String::new(),
    }
}

fn field(id: &str, label: &str, bounds: (u16, u16, u16, u16), text: &str) -> SceneElement {
    SceneElement {
        editable: true,
        text: text.into(),
        ..el(id, "text_field", label, bounds)
    }
}

fn text_el(id: &str, label: &str, bounds: (u16, u16, u16, u16), text: &str) -> SceneElement {
    SceneElement { text: text.into(), ..el(id, "text", label, bounds) }
}

fn goto(screen: &str, element: &str, next: &str) -> TransitionRule {
    TransitionRule {
        screen: screen.into(),
        trigger: Trigger::on_element(element),
        next_screen: Some(next.into()),
        mutation: None,
    }
}

fn on_action(screen: &str, action: ActionName, next: &str) -> TransitionRule {
    TransitionRule {
        screen: screen.into(),
        trigger: Trigger::on_action(action),
        next_screen: Some(next.into()),
        mutation: None,
    }
}

fn tap(x: u16, y: u16) -> Action {
    Action::Tap { point: NormPoint::new(x, y).expect("static point is valid") }
}

fn type_at(x: u16, y: u16, text: &str) -> Action {
    Action::PointInput {
        point: NormPoint::new(x, y).expect("static point is valid"),
        text: text.into(),
    }
}

fn complete() -> Action {
    Action::SetTaskStatus { status: TaskStatus::Complete }
}

fn on_screen(screen: &str) -> Checker {
    Checker::OnScreen { screen: screen.into() }
}

fn field_eq(element: &str, expected: &str) -> Checker {
    Checker::FieldEquals { element: element.into(), expected: expected.into() }
}

fn all(checks: Vec<Checker>) -> Checker {
    Checker::All { checks }
}

/// Contacts app: home tabs, a contact list with search, a creation form.
pub fn contacts_app() -> AppScript {
    AppScript {
        name: "contacts".into(),
        initial_screen: "home".into(),
        screens: vec![
            Screen {
                id: "home".into(),
                dims: dims(),
                elements: vec![
                    text_el("banner", "Phone", (0, 0, 1000, 80), "Phone app home"),
                    el("tab_contacts", "tab", "Contacts", (60, 880, 300, 950)),
                    el("tab_favorites", "tab", "Favorites", (380, 880, 620, 950)),
                ],
            },
            Screen {
                id: "contacts_list".into(),
                dims: dims(),
                elements: vec![
                    field("search_field", "Search contacts", (40, 40, 580, 110), ""),
                    el("btn_create", "button", "Create new contact", (620, 40, 980, 110)),
                    el("contact_row_bob", "list_item", "Bob Stone", (40, 160, 980, 240)),
                ],
            },
            Screen {
                id: "contact_form".into(),
                dims: dims(),
                elements: vec![
                    el("btn_save", "button", "Save", (700, 40, 960, 110)),
                    field("field_name", "Name", (60, 160, 940, 240), ""),
                    field("field_phone", "Phone", (60, 300, 940, 380), ""),
                ],
            },
            Screen {
                id: "contact_saved".into(),
                dims: dims(),
                elements: vec![
                    text_el("confirmation", "Saved", (200, 400, 800, 480), "Contact saved"),
                    el("btn_done", "button", "Done", (380, 560, 620, 640)),
                ],
            },
        ],
        rules: vec![
            goto("home", "tab_contacts", "contacts_list"),
            goto("contacts_list", "btn_create", "contact_form"),
            on_action("contacts_list", ActionName::Back, "home"),
            goto("contact_form", "btn_save", "contact_saved"),
            on_action("contact_form", ActionName::Back, "contacts_list"),
            goto("contact_saved", "btn_done", "contacts_list"),
        ],
        tasks: vec![
            TaskSpec {
                id: "open_contacts".into(),
                difficulty: Difficulty::Easy,
                goal: "Open the Contacts section".into(),
                checker: on_screen("contacts_list"),
                oracle: vec![tap(180, 915), complete()],
            },
            TaskSpec {
                id: "search_bob".into(),
                difficulty: Difficulty::Easy,
                goal: "Search the contacts for Bob".into(),
                checker: all(vec![
                    on_screen("contacts_list"),
                    Checker::FieldContains { element: "search_field".into(), needle: "Bob".into() },
                ]),
                oracle: vec![tap(180, 915), type_at(310, 75, "Bob"), complete()],
            },
            TaskSpec {
                id: "create_contact".into(),
                difficulty: Difficulty::Middle,
                goal: "Create a new contact named Alice".into(),
                checker: all(vec![field_eq("field_name", "Alice"), on_screen("contact_saved")]),
                oracle: vec![
                    tap(180, 915),
                    tap(800, 75),
                    type_at(500, 200, "Alice"),
                    tap(830, 75),
                    complete(),
                ],
            },
            TaskSpec {
                id: "create_contact_full".into(),
                difficulty: Difficulty::Hard,
                goal: "Create a contact named Carol with phone 555-0102".into(),
                checker: all(vec![
                    field_eq("field_name", "Carol"),
                    field_eq("field_phone", "555-0102"),
                    on_screen("contact_saved"),
                ]),
                oracle: vec![
                    tap(180, 915),
                    tap(800, 75),
                    type_at(500, 200, "Carol"),
                    type_at(500, 340, "555-0102"),
                    tap(830, 75),
                    complete(),
                ],
            },
        ],
    }
}

/// Messaging app: an inbox, a thread with a reply box, a compose screen.
pub fn messaging_app() -> AppScript {
    AppScript {
        name: "messaging".into(),
        initial_screen: "inbox".into(),
        screens: vec![
            Screen {
                id: "inbox".into(),
                dims: dims(),
                elements: vec![
                    text_el("msg_bob", "Message from Bob", (40, 160, 980, 260), "Lunch tomorrow?"),
                    text_el(
                        "msg_dana",
                        "Message from Dana",
                        (40, 300, 980, 400),
                        "Report due Friday",
                    ),
                    el("btn_start_chat", "button", "Start chat", (620, 860, 980, 940)),
                ],
            },
            Screen {
                id: "thread_bob".into(),
                dims: dims(),
                elements: vec![
                    text_el("thread_title", "Bob", (0, 0, 1000, 80), "Chat with Bob"),
                    field("reply_field", "Reply", (40, 860, 760, 940), ""),
                    el("btn_send", "button", "Send", (800, 860, 980, 940)),
                ],
            },
            Screen {
                id: "new_chat".into(),
                dims: dims(),
                elements: vec![
                    field("recipient_field", "To", (40, 40, 980, 110), ""),
                    field("compose_field", "Message", (40, 860, 760, 940), ""),
                    el("btn_send_new", "button", "Send", (800, 860, 980, 940)),
                ],
            },
            Screen {
                id: "sent".into(),
                dims: dims(),
                elements: vec![
                    text_el("sent_banner", "Sent", (300, 420, 700, 500), "Message sent"),
                    el("btn_back_inbox", "button", "Back to inbox", (300, 560, 700, 640)),
                ],
            },
        ],
        rules: vec![
            goto("inbox", "msg_bob", "thread_bob"),
            goto("inbox", "btn_start_chat", "new_chat"),
            goto("thread_bob", "btn_send", "sent"),
            on_action("thread_bob", ActionName::Enter, "sent"),
            on_action("thread_bob", ActionName::Back, "inbox"),
            goto("new_chat", "btn_send_new", "sent"),
            on_action("new_chat", ActionName::Back, "inbox"),
            goto("sent", "btn_back_inbox", "inbox"),
        ],
        tasks: vec![
            TaskSpec {
                id: "open_thread".into(),
                difficulty: Difficulty::Easy,
                goal: "Open the message from Bob".into(),
                checker: on_screen("thread_bob"),
                oracle: vec![tap(510, 210), complete()],
            },
            TaskSpec {
                id: "start_chat".into(),
                difficulty: Difficulty::Easy,
                goal: "Start a new chat".into(),
                checker: on_screen("new_chat"),
                oracle: vec![tap(800, 900), complete()],
            },
            TaskSpec {
                id: "reply_to_message".into(),
                difficulty: Difficulty::Middle,
                goal: "Reply 'On my way' to the message from Bob".into(),
                checker: all(vec![field_eq("reply_field", "On my way"), on_screen("sent")]),
                oracle: vec![
                    tap(510, 210),
                    type_at(400, 900, "On my way"),
                    Action::Enter,
                    complete(),
                ],
            },
            TaskSpec {
                id: "compose_message".into(),
                difficulty: Difficulty::Hard,
                goal: "Send a new message to Dana saying 'Meeting moved to 3pm'".into(),
                checker: all(vec![
                    field_eq("recipient_field", "Dana"),
                    field_eq("compose_field", "Meeting moved to 3pm"),
                    on_screen("sent"),
                ]),
                oracle: vec![
                    tap(800, 900),
                    type_at(510, 75, "Dana"),
                    type_at(400, 900, "Meeting moved to 3pm"),
                    tap(890, 900),
                    complete(),
                ],
            },
        ],
    }
}

/// Settings app: a scrollable settings list, Wi-Fi and display panes,
/// and an about screen with the build number.
pub fn settings_app() -> AppScript {
    AppScript {
        name: "settings".into(),
        initial_screen: "settings_home".into(),
        screens: vec![
            Screen {
                id: "settings_home".into(),
                dims: dims(),
                elements: vec![
                    el("row_wifi", "list_item", "Wi-Fi", (40, 160, 980, 240)),
                    el("row_display", "list_item", "Display", (40, 300, 980, 380)),
                    text_el("hint", "More", (40, 940, 980, 990), "More settings below"),
                ],
            },
            Screen {
                id: "settings_more".into(),
                dims: dims(),
                elements: vec![
                    el("row_about", "list_item", "About phone", (40, 160, 980, 240)),
                    el("row_battery", "list_item", "Battery", (40, 300, 980, 380)),
                ],
            },
            Screen {
                id: "wifi".into(),
                dims: dims(),
                elements: vec![
                    text_el("wifi_status", "Status", (40, 160, 700, 240), "Wi-Fi is off"),
                    text_el("wifi_toggle", "Wi-Fi toggle", (800, 160, 960, 240), "off"),
                ],
            },
            Screen {
                id: "display".into(),
                dims: dims(),
                elements: vec![field("brightness_field", "Brightness", (40, 300, 940, 380), "50")],
            },
            Screen {
                id: "about".into(),
                dims: dims(),
                elements: vec![text_el(
                    "version_row",
                    "Build number",
                    (40, 160, 980, 240),
                    "Build 5.2.1",
                )],
            },
        ],
        rules: vec![
            TransitionRule {
                screen: "settings_home".into(),
                trigger: Trigger::on_scroll(Direction::Down),
                next_screen: Some("settings_more".into()),
                mutation: None,
            },
            TransitionRule {
                screen: "settings_more".into(),
                trigger: Trigger::on_scroll(Direction::Up),
                next_screen: Some("settings_home".into()),
                mutation: None,
            },
            goto("settings_home", "row_wifi", "wifi"),
            goto("settings_home", "row_display", "display"),
            goto("settings_more", "row_about", "about"),
            TransitionRule {
                screen: "wifi".into(),
                trigger: Trigger::on_element("wifi_toggle"),
                next_screen: None,
                mutation: Some(Mutation::SetText { element: "wifi_toggle".into(), text: "on".into() }),
            },
            on_action("wifi", ActionName::Back, "settings_home"),
            on_action("display", ActionName::Back, "settings_home"),
            on_action("about", ActionName::Back, "settings_more"),
        ],
        tasks: vec![
            TaskSpec {
                id: "open_wifi".into(),
                difficulty: Difficulty::Easy,
                goal: "Open the Wi-Fi settings".into(),
                checker: on_screen("wifi"),
                oracle: vec![tap(510, 200), complete()],
            },
            TaskSpec {
                id: "enable_wifi".into(),
                difficulty: Difficulty::Middle,
                goal: "Turn Wi-Fi on".into(),
                checker: field_eq("wifi_toggle", "on"),
                oracle: vec![tap(510, 200), tap(880, 200), complete()],
            },
            TaskSpec {
                id: "set_brightness".into(),
                difficulty: Difficulty::Middle,
                goal: "Set the brightness to 80".into(),
                checker: field_eq("brightness_field", "80"),
                oracle: vec![tap(510, 340), type_at(490, 340, "80"), complete()],
            },
            TaskSpec {
                id: "note_build_number".into(),
                difficulty: Difficulty::Hard,
                goal: "Find the build number in About and remember it".into(),
                checker: Checker::NoteRecorded { needle: "5.2.1".into() },
                oracle: vec![
                    Action::Scroll { direction: Direction::Down },
                    tap(510, 200),
                    Action::Remember { content: Some("Build 5.2.1".into()) },
                    complete(),
                ],
            },
            TaskSpec {
                id: "wifi_on_then_home".into(),
                difficulty: Difficulty::Hard,
                goal: "Turn Wi-Fi on and return to the settings home screen".into(),
                checker: all(vec![field_eq("wifi_toggle", "on"), on_screen("settings_home")]),
                oracle: vec![tap(510, 200), tap(880, 200), Action::Back, complete()],
            },
        ],
    }
}

/// All bundled apps.
pub fn bundled_apps() -> Vec<AppScript> {
    vec![contacts_app(), messaging_app(), settings_app()]
}
