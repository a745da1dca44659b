//! Published example dialogues and the instances they were played on.

use pings_core::games::chess::{Board, ChessInstance};
use pings_core::games::covr::{
    self, BothSemantics, CovrInstance, Descriptor, Entity, Query, Relation, Scene,
};
use pings_core::games::namegame::{NameGameInstance, PersonRecord};
use pings_core::games::selection::SelectionGold;
use pings_core::games::{GameInstance, TaskId};
use pings_core::Speaker;

pub struct DialogueFixture {
    pub name: &'static str,
    pub instance: GameInstance,
    pub turn_budget: u32,
    pub script: &'static [&'static str],
    pub successful: bool,
    /// Turn on which the dialogue should end.
    pub ends_at: u32,
}

pub const COVR_SCRIPT: &[&str] = &[
    "Okay, let's figure this out! I see a bedroom with a desk and a fireplace. Do you see a cafeteria in your image?",
    "No, I don't see a cafeteria. I see a living room with a display cabinet.",
    "Okay. Does your living room have a table with a bowl on it?",
    "No, I don't see a bowl on a table. I do see a coffee table.",
    "Does your living room have a table with a paper towel on it?",
    "No, I don't see a paper towel on any table.",
    "Okay, so I see a bedroom, you see a living room. Neither of us has a bowl/paper towel on a table in the right places.",
    "ANSWER: False",
];

pub const MD3_SCRIPT: &[&str] = &[
    "A bird with a bright yellow head and black body perched among tall reeds near water.",
    "Can you describe the bird's pose or its surroundings further?",
    "The bird is facing left, gripping reeds with its beak, with a rippling water background.",
    "ANSWER: Image 5",
];

pub const TANGRAM_SCRIPT: &[&str] = &[
    "Describer: Black and white geometric pattern with diagonal stripes.",
    "ANSWER: Image 0",
];

pub const NAME_GAME_SCRIPT: &[&str] = &[
    "Hello! I know a Michael who works at Cisco. Do you know him?",
    "I don't know a Michael at Cisco. Do you know anyone who works at Apple?",
    "I don't know anyone at Apple. I know an Andrew who works at Amazon. Do you know him?",
    "I don't know Andrew. Do you know anyone who is a Leo?",
    "Yes, I know two Leos. One works at Tesla. Do you know an Ethan who works at Tesla and likes Miles Davis?",
    "I don't know Ethan. I know two Leos at Tesla liking Miles Davis, but different names. Do you know a Pisces?",
    "I don't know a Pisces. I know one Leo at Tesla liking Miles Davis. Her name is Isabella. Do you know her?",
    "SELECT ROW 1",
];

pub const CHESS_PRO_SCRIPT: &[&str] = &[
    "Hi Bob. My board has the White King on g1 and a Rook on b1. The Black King is on f8. Both sides have 7",
    "Okay Alice. My board has 8 white pawns and 8 black pawns. White King is on e1, Black King on e8.",
    "Okay Bob. My board has only 6 white pawns and 7 black pawns. My White King has castled kingside to g1.",
    "Okay Alice. My Kings are still on e1 and e8, not castled. I have 15 white pieces, 16 black pieces.",
    "Okay Bob. My board has fewer pieces than yours: 13 white pieces and 14 black pieces. Several pieces have been captured. Yours must be",
    "Okay Alice. My board has more pieces and pawns than yours. My Kings haven't moved or castled yet. Yours have. Therefore,",
    "Okay Bob. Your board has more pieces and pawns than mine. Your Kings are on their starting squares, while my White King has castled. This confirms",
    "_MINE_",
];

pub const CHESS_SYCOPHANCY_SCRIPT: &[&str] = &[
    "Okay Bob, my board has no White Queen. Black King is on C8, White King on E1. Black Queen is on G7.",
    "My White King is on F1, Black King on E8. Black Queen is on D6. White Bishop H3, Black Bishop G4.",
    "Interesting. My White Bishop is on G4. You say your Black Bishop is on G4. That's impossible. Can you clarify?",
    "Okay, Alice. My apologies, I misspoke. My Black Bishop is on G4. My White Bishop is on H3. My White King is on",
    "Okay Bob, let's focus on the Kings and Bishops. My Black Bishop is on F8, yours is on G4. My White King is on",
    "Okay Alice, your board came first. Black castled queenside, White castled kingside later. Black Bishop F8 to G4.",
    "Yes, Bob, your analysis is correct. My board came first. Black castled queenside, then White castled kingside. _MINE_",
];

pub const CHESS_PRO_ALICE: &str = "\
. . b . . k r .
r . . q p p . .
n p p . . . . .
p B . . . . . p
. P . . . P p P
. . P . P . P .
P . . P . . . .
. R B Q . K N .";

pub const CHESS_PRO_BOB: &str = "\
r n b q k b r .
. . p p p p p .
p p . . . . . p
. . . . . . . .
B P . . N . . .
. . . . P . . P
P . P P N P P .
R . B Q K . . n";

const NAME_GAME_ALICE: [[&str; 5]; 9] = [
    ["Michael", "Scorpio", "Cisco", "John Coltrane", "Corn"],
    ["Andrew", "Aries", "Amazon", "Count Basie", "Shellfish"],
    ["Ethan", "Cancer", "Tesla", "Miles Davis", "Eggs"],
    ["Asher", "Aries", "Sony", "Ella Fitzgerald", "Corn"],
    ["Lucas", "Capricorn", "Amazon", "Art Blakey", "Fish"],
    ["Charlotte", "Libra", "Cisco", "Nina Simone", "Mustard"],
    ["Isabella", "Leo", "Tesla", "Miles Davis", "Eggs"],
    ["Asher", "Cancer", "Google", "Ella Fitzgerald", "Corn"],
    ["Isabella", "Leo", "HP", "Miles Davis", "Eggs"],
];

const NAME_GAME_BOB: [[&str; 5]; 9] = [
    ["Isabella", "Leo", "Tesla", "Miles Davis", "Eggs"],
    ["Lily", "Sagittarius", "HP", "Herbie Hancock", "Soy"],
    ["Chloe", "Pisces", "Oracle", "Herbie Hancock", "Mustard"],
    ["Chloe", "Gemini", "Qualcomm", "Louis Armstrong", "Gelatin"],
    ["Sophia", "Libra", "Samsung", "Wes Montgomery", "Peanuts"],
    ["Aurora", "Capricorn", "Apple", "Billie Holiday", "Sesame"],
    ["Sofia", "Leo", "Amazon", "Art Blakey", "Tree Nuts"],
    ["Ella", "Pisces", "Apple", "Thelonious Monk", "Tree Nuts"],
    ["Samuel", "Leo", "Tesla", "Miles Davis", "Corn"],
];

pub fn name_game_instance() -> NameGameInstance {
    let db = |rows: &[[&str; 5]]| rows.iter().map(|r| PersonRecord::new(*r)).collect::<Vec<_>>();
    NameGameInstance {
        db_a: db(&NAME_GAME_ALICE),
        db_b: db(&NAME_GAME_BOB),
        common_row_a: 7,
        common_row_b: 1,
        seed: 0,
        size: 9,
    }
}

pub fn chess_pro_instance() -> ChessInstance {
    ChessInstance::from_positions(
        Board::from_ascii(CHESS_PRO_ALICE).expect("alice diagram"),
        Board::from_ascii(CHESS_PRO_BOB).expect("bob diagram"),
        Speaker::Bob,
        0,
    )
}

fn entity(category: &str) -> Entity {
    Entity {
        category: category.into(),
        attributes: Default::default(),
        relations: Vec::new(),
    }
}

pub fn covr_instance() -> CovrInstance {
    let scene_a = Scene {
        scene_type: "bedroom".into(),
        entities: vec![entity("desk"), entity("fireplace")],
    };
    let scene_b = Scene {
        scene_type: "living room".into(),
        entities: vec![entity("display cabinet"), entity("coffee table")],
    };
    let query = Query::ExistsBoth(
        Descriptor::new("bowl").related(Relation::On, Descriptor::new("table").in_scene("bedroom")),
        Descriptor::new("paper towel").related(Relation::On, Descriptor::new("table").in_scene("cafeteria")),
    );
    let semantics = BothSemantics::default();
    CovrInstance {
        gold: covr::eval_query(&query, &scene_a, &scene_b, semantics),
        surface_text: covr::realize_question(&query),
        scene_a,
        scene_b,
        query,
        seed: 0,
        semantics,
    }
}

/// First generated selection instance whose gold is `Image(index)`.
pub fn selection_with_gold(task: TaskId, index: usize) -> GameInstance {
    (0..)
        .map(|s| task.generate(s).expect("selection instance"))
        .find(|g| matches!(g, GameInstance::Selection(s) if s.gold == SelectionGold::Image(index)))
        .expect("some seed has this gold")
}

pub fn replay_fixtures() -> Vec<DialogueFixture> {
    vec![
        DialogueFixture {
            name: "covr",
            instance: GameInstance::Covr(covr_instance()),
            turn_budget: 8,
            script: COVR_SCRIPT,
            successful: true,
            ends_at: 8,
        },
        DialogueFixture {
            name: "md3",
            // The describer's image is the last of six.
            instance: selection_with_gold(TaskId::Md3, 5),
            turn_budget: 8,
            script: MD3_SCRIPT,
            successful: true,
            ends_at: 4,
        },
        DialogueFixture {
            name: "tangram",
            // The describer's image is the last of four.
            instance: selection_with_gold(TaskId::Tangram, 3),
            turn_budget: 16,
            script: TANGRAM_SCRIPT,
            successful: false,
            ends_at: 2,
        },
        DialogueFixture {
            name: "name-game",
            instance: GameInstance::NameGame(name_game_instance()),
            turn_budget: 8,
            script: NAME_GAME_SCRIPT,
            successful: true,
            ends_at: 8,
        },
        DialogueFixture {
            name: "chess",
            instance: GameInstance::Chess(chess_pro_instance()),
            turn_budget: 8,
            script: CHESS_PRO_SCRIPT,
            successful: true,
            ends_at: 8,
        },
    ]
}

/// Image-selection dialogue with a figure-annotated centering analysis.
pub const PASTA: [&str; 8] = [
    "A close-up of creamy, long pasta, possibly fettuccine Alfredo, served in a shallow, yellowish bowl.",
    "Does the pasta have any green vegetables like broccoli in it?",
    "No, there are no visible green vegetables in the pasta.",
    "Is the bowl truly yellowish? Does the pasta have any garnish or other items like shrimp?",
    "Yes, the bowl is a pale, matte yellow. No garnish or shrimp, just creamy pasta.",
    "Is the bowl definitely yellow, or could it be white or off-white, perhaps due to lighting?",
    "The bowl is definitely a solid, pale yellow, not white or off-white. Its actual color appears to be yellow.",
    "No match.",
];

/// Name-game dialogue that keeps changing the topic.
pub const NAMES: [&str; 6] = [
    "I know Mateo. He loves Herbie Hancock, photography, and Forest Green. University? Los Angeles.",
    "No mutual match yet. Herbie Hancock fans: Mia, Hazel (row 2,7). Check if you know either. University? Photography? Color?",
    "I know Hazel. Ella Fitzgerald, University of Michigan, Birdwatching, Beige. Do you know her? Confirm all traits.",
    "Row 6 matches: Hazel, Ella Fitzgerald, University of Michigan, Birdwatching, Beige. Confirm mutual knowledge.",
    "I know Andrew. Ella Fitzgerald, UPenn, Gardening, Navy. Do you know him? Confirm all traits.",
    "No match for Andrew. Ella Fitzgerald, UPenn, Gardening, Navy? No row matches all. Confirm if you know Hazel or Mia.",
];
