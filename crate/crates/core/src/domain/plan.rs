use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// The only empty marker a plan field ever holds.
pub const EMPTY: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanField {
    CurrentCity,
    Transportation,
    Breakfast,
    Attraction,
    Lunch,
    Dinner,
    Accommodation,
}

impl PlanField {
    pub const ALL: [PlanField; 7] = [
        PlanField::CurrentCity,
        PlanField::Transportation,
        PlanField::Breakfast,
        PlanField::Attraction,
        PlanField::Lunch,
        PlanField::Dinner,
        PlanField::Accommodation,
    ];

    pub const MEALS: [PlanField; 3] = [PlanField::Breakfast, PlanField::Lunch, PlanField::Dinner];

    pub fn key(self) -> &'static str {
        match self {
            PlanField::CurrentCity => "current_city",
            PlanField::Transportation => "transportation",
            PlanField::Breakfast => "breakfast",
            PlanField::Attraction => "attraction",
            PlanField::Lunch => "lunch",
            PlanField::Dinner => "dinner",
            PlanField::Accommodation => "accommodation",
        }
    }

    /// Label used in the plain-text plan layout ("Current City", ...).
    pub fn label(self) -> &'static str {
        match self {
            PlanField::CurrentCity => "Current City",
            PlanField::Transportation => "Transportation",
            PlanField::Breakfast => "Breakfast",
            PlanField::Attraction => "Attraction",
            PlanField::Lunch => "Lunch",
            PlanField::Dinner => "Dinner",
            PlanField::Accommodation => "Accommodation",
        }
    }
}

impl fmt::Display for PlanField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DailyPlan {
    pub day: u32,
    pub current_city: String,
    pub transportation: String,
    pub breakfast: String,
    pub attraction: String,
    pub lunch: String,
    pub dinner: String,
    pub accommodation: String,
}

fn normalize(value: impl Into<String>) -> String {
    let value = value.into();
    let trimmed = value.trim();
    if trimmed.is_empty() || trimmed == EMPTY {
        EMPTY.to_string()
    } else if trimmed.len() == value.len() {
        value
    } else {
        trimmed.to_string()
    }
}

impl DailyPlan {
    /// A day with every field set to the empty marker.
    pub fn empty(day: u32) -> Self {
        DailyPlan {
            day,
            current_city: EMPTY.into(),
            transportation: EMPTY.into(),
            breakfast: EMPTY.into(),
            attraction: EMPTY.into(),
            lunch: EMPTY.into(),
            dinner: EMPTY.into(),
            accommodation: EMPTY.into(),
        }
    }

    pub fn get(&self, field: PlanField) -> &str {
        match field {
            PlanField::CurrentCity => &self.current_city,
            PlanField::Transportation => &self.transportation,
            PlanField::Breakfast => &self.breakfast,
            PlanField::Attraction => &self.attraction,
            PlanField::Lunch => &self.lunch,
            PlanField::Dinner => &self.dinner,
            PlanField::Accommodation => &self.accommodation,
        }
    }

    /// Sets a field; blank values become the empty marker.
    pub fn set(&mut self, field: PlanField, value: impl Into<String>) {
        let value = normalize(value);
        match field {
            PlanField::CurrentCity => self.current_city = value,
            PlanField::Transportation => self.transportation = value,
            PlanField::Breakfast => self.breakfast = value,
            PlanField::Attraction => self.attraction = value,
            PlanField::Lunch => self.lunch = value,
            PlanField::Dinner => self.dinner = value,
            PlanField::Accommodation => self.accommodation = value,
        }
    }

    pub fn with(mut self, field: PlanField, value: impl Into<String>) -> Self {
        self.set(field, value);
        self
    }

    pub fn is_empty_field(&self, field: PlanField) -> bool {
        self.get(field) == EMPTY
    }

    /// Plain-text layout used in observations and prompts.
    pub fn to_text(&self) -> String {
        let mut out = format!("Day {}:\n", self.day);
        for field in PlanField::ALL {
            out.push_str(&format!("{}: {}\n", field.label(), self.get(field)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelPlan {
    pub query_id: String,
    pub days: Vec<DailyPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanDocumentError {
    #[error("plan has no days")]
    Empty,
    #[error("day numbering is not contiguous: expected day {expected}, found day {found}")]
    NonContiguous { expected: u32, found: u32 },
    #[error("malformed plan document: {0}")]
    Syntax(String),
    #[error("day {}: field {field:?}: {message}", day.map(|d| d.to_string()).unwrap_or_else(|| "?".into()))]
    Field {
        day: Option<u32>,
        field: String,
        message: String,
    },
}

impl TravelPlan {
    pub fn check_contiguous(days: &[DailyPlan]) -> Result<(), PlanDocumentError> {
        if days.is_empty() {
            return Err(PlanDocumentError::Empty);
        }
        for (i, d) in days.iter().enumerate() {
            let expected = i as u32 + 1;
            if d.day != expected {
                return Err(PlanDocumentError::NonContiguous { expected, found: d.day });
            }
        }
        Ok(())
    }
}

/// Renders a plan as a JSON array of day objects with the eight canonical keys.
pub fn serialize_plan(plan: &TravelPlan) -> Result<String, PlanDocumentError> {
    TravelPlan::check_contiguous(&plan.days)?;
    let days: Vec<DailyPlan> = plan
        .days
        .iter()
        .map(|d| {
            let mut out = d.clone();
            for field in PlanField::ALL {
                out.set(field, d.get(field).to_string());
            }
            out
        })
        .collect();
    serde_json::to_string_pretty(&days).map_err(|e| PlanDocumentError::Syntax(e.to_string()))
}

/// Parses a document produced by [`serialize_plan`]. Extra or missing keys are errors.
pub fn parse_plan_document(query_id: &str, text: &str) -> Result<TravelPlan, PlanDocumentError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| PlanDocumentError::Syntax(e.to_string()))?;
    let Value::Array(items) = value else {
        return Err(PlanDocumentError::Syntax("expected an array of day objects".into()));
    };
    let days = items
        .iter()
        .map(|item| parse_day_value(item, None))
        .collect::<Result<Vec<_>, _>>()?;
    TravelPlan::check_contiguous(&days)?;
    Ok(TravelPlan { query_id: query_id.to_string(), days })
}

/// Parses one day object. When `day_override` is set, a missing `day` key is allowed.
pub fn parse_day_value(value: &Value, day_override: Option<u32>) -> Result<DailyPlan, PlanDocumentError> {
    let Value::Object(map) = value else {
        return Err(PlanDocumentError::Syntax("expected a day object".into()));
    };
    let day = match (map.get("day"), day_override) {
        (_, Some(d)) => d,
        (Some(v), None) => day_number(v)?,
        (None, None) => {
            return Err(PlanDocumentError::Field {
                day: None,
                field: "day".into(),
                message: "missing key".into(),
            })
        }
    };
    check_keys(map, day)?;
    let mut plan = DailyPlan::empty(day);
    for field in PlanField::ALL {
        let raw = map.get(field.key()).ok_or_else(|| PlanDocumentError::Field {
            day: Some(day),
            field: field.key().into(),
            message: "missing key".into(),
        })?;
        let text = match raw {
            Value::String(s) => s.clone(),
            Value::Null => EMPTY.to_string(),
            other => {
                return Err(PlanDocumentError::Field {
                    day: Some(day),
                    field: field.key().into(),
                    message: format!("expected a string, found {other}"),
                })
            }
        };
        plan.set(field, text);
    }
    Ok(plan)
}

fn day_number(v: &Value) -> Result<u32, PlanDocumentError> {
    let n = match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    match n {
        Some(n) if n >= 1 && n <= u64::from(u32::MAX) => Ok(n as u32),
        _ => Err(PlanDocumentError::Field {
            day: None,
            field: "day".into(),
            message: format!("expected a positive integer, found {v}"),
        }),
    }
}

fn check_keys(map: &Map<String, Value>, day: u32) -> Result<(), PlanDocumentError> {
    for key in map.keys() {
        if key != "day" && !PlanField::ALL.iter().any(|f| f.key() == key) {
            return Err(PlanDocumentError::Field {
                day: Some(day),
                field: key.clone(),
                message: "unknown key".into(),
            });
        }
    }
    Ok(())
}
