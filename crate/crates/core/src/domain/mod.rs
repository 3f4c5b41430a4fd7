//! Value types shared by every phase of the planner.

mod error_code;
mod money;
pub(crate) mod plan;
mod query;
mod record;

pub use error_code::{CodeFamily, ErrorCode};
pub use money::{Money, MoneyParseError};
pub use plan::{
    parse_day_value, parse_plan_document, serialize_plan, DailyPlan, PlanDocumentError, PlanField,
    TravelPlan, EMPTY,
};
pub use query::{
    ordinal_word, parse_ordinal_word, prose_date, DestinationScope, HardConstraintSet, QueryError,
    RoomRule, RoomTypeRequirement, TransportBan, TravelQuery,
};
pub use record::{
    format_record, Accommodation, Attraction, Distance, Flight, HouseRule, Restaurant,
    RoomType, SandboxRecord, TravelMode, VocabularyError,
};
