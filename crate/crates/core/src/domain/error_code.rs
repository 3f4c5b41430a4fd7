use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable codes for verifier findings and delivery failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCode {
    // commonsense dimensions
    HallucinatedInformation,
    NecessaryInformationAbsent,
    OutsideCurrentCity,
    InvalidCityRoute,
    RepeatedRestaurant,
    RepeatedAttraction,
    ConflictingTransportation,
    InvalidAccommodationMinNights,
    // day-scope running budget
    BudgetExceeded,
    // hard constraints
    HardBudget,
    HardRoomRule,
    HardRoomType,
    HardCuisine,
    HardTransportation,
    // delivery failures
    StepLimitExceeded,
    RepeatedToolLoop,
    MalformedToolCall,
    OutlineFailure,
    DayPlanFailure,
    BackendFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeFamily {
    Commonsense,
    RunningBudget,
    Hard,
    Delivery,
}

impl ErrorCode {
    /// The eight commonsense dimensions, in evaluation order.
    pub const COMMONSENSE: [ErrorCode; 8] = [
        ErrorCode::HallucinatedInformation,
        ErrorCode::NecessaryInformationAbsent,
        ErrorCode::OutsideCurrentCity,
        ErrorCode::InvalidCityRoute,
        ErrorCode::RepeatedRestaurant,
        ErrorCode::RepeatedAttraction,
        ErrorCode::ConflictingTransportation,
        ErrorCode::InvalidAccommodationMinNights,
    ];

    pub const HARD: [ErrorCode; 5] = [
        ErrorCode::HardBudget,
        ErrorCode::HardRoomRule,
        ErrorCode::HardRoomType,
        ErrorCode::HardCuisine,
        ErrorCode::HardTransportation,
    ];

    pub fn family(self) -> CodeFamily {
        use ErrorCode::*;
        match self {
            HallucinatedInformation
            | NecessaryInformationAbsent
            | OutsideCurrentCity
            | InvalidCityRoute
            | RepeatedRestaurant
            | RepeatedAttraction
            | ConflictingTransportation
            | InvalidAccommodationMinNights => CodeFamily::Commonsense,
            BudgetExceeded => CodeFamily::RunningBudget,
            HardBudget | HardRoomRule | HardRoomType | HardCuisine | HardTransportation => {
                CodeFamily::Hard
            }
            StepLimitExceeded | RepeatedToolLoop | MalformedToolCall | OutlineFailure
            | DayPlanFailure | BackendFailure => CodeFamily::Delivery,
        }
    }

    /// Significant errors trigger the one-time return to information collection.
    pub fn is_significant(self) -> bool {
        matches!(self, ErrorCode::HallucinatedInformation | ErrorCode::NecessaryInformationAbsent)
    }

    pub fn name(self) -> &'static str {
        use ErrorCode::*;
        match self {
            HallucinatedInformation => "HallucinatedInformation",
            NecessaryInformationAbsent => "NecessaryInformationAbsent",
            OutsideCurrentCity => "OutsideCurrentCity",
            InvalidCityRoute => "InvalidCityRoute",
            RepeatedRestaurant => "RepeatedRestaurant",
            RepeatedAttraction => "RepeatedAttraction",
            ConflictingTransportation => "ConflictingTransportation",
            InvalidAccommodationMinNights => "InvalidAccommodationMinNights",
            BudgetExceeded => "BudgetExceeded",
            HardBudget => "HardBudget",
            HardRoomRule => "HardRoomRule",
            HardRoomType => "HardRoomType",
            HardCuisine => "HardCuisine",
            HardTransportation => "HardTransportation",
            StepLimitExceeded => "StepLimitExceeded",
            RepeatedToolLoop => "RepeatedToolLoop",
            MalformedToolCall => "MalformedToolCall",
            OutlineFailure => "OutlineFailure",
            DayPlanFailure => "DayPlanFailure",
            BackendFailure => "BackendFailure",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_names_are_stable() {
        for code in ErrorCode::COMMONSENSE.into_iter().chain(ErrorCode::HARD) {
            let json = serde_json::to_string(&code).unwrap();
            assert_eq!(json, format!("\"{}\"", code.name()));
        }
    }

    #[test]
    fn families() {
        assert!(ErrorCode::COMMONSENSE.iter().all(|c| c.family() == CodeFamily::Commonsense));
        assert!(ErrorCode::HARD.iter().all(|c| c.family() == CodeFamily::Hard));
        assert_eq!(ErrorCode::RepeatedToolLoop.family(), CodeFamily::Delivery);
        assert!(ErrorCode::HallucinatedInformation.is_significant());
        assert!(!ErrorCode::BudgetExceeded.is_significant());
    }
}
