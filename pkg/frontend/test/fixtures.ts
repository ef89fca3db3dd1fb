// Shared test data shaped exactly like the review service JSON.

import type { ReviewRecord } from "../src/types.js";

export function frisbeeRecord(overrides: Partial<ReviewRecord> = {}): ReviewRecord {
  return {
    record_id: "aaaa000011112222",
    image_ref: "frisbee_park.jpg",
    kind: "object_object",
    question: "What is the relationship between player in black and frisbee?",
    answer: "player in black reaches for frisbee.",
    evidence: [
      { subject: "e1", predicate: "reaches for", object: "e3", kind: "interaction" },
    ],
    final_graph: {
      entities: [
        {
          id: "e1",
          label: "player",
          qualifiers: ["in black"],
          bbox: [0.1, 0.2, 0.3, 0.9],
          question_mentioned: false,
        },
        {
          id: "e2",
          label: "grass",
          qualifiers: [],
          bbox: null,
          question_mentioned: false,
        },
        {
          id: "e3",
          label: "frisbee",
          qualifiers: [],
          bbox: [0.4, 0.05, 0.5, 0.18],
          question_mentioned: true,
        },
      ],
      edges: [
        {
          subject: "e1",
          predicate: "reaches for",
          object: "e3",
          kind: "interaction",
          provenance: "interaction",
          grounded: true,
        },
        {
          subject: "e3",
          predicate: "on",
          object: "e2",
          kind: "spatial",
          provenance: "spatial",
          grounded: false,
        },
      ],
    },
    review_status: "unreviewed",
    source_tag: "demo",
    ...overrides,
  };
}

export function secondRecord(): ReviewRecord {
  return frisbeeRecord({
    record_id: "bbbb333344445555",
    kind: "subject_relation",
    question: "What does player in black reaches for?",
    answer: "player in black reaches for frisbee.",
  });
}
