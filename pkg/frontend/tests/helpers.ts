import { Client, DecisionEvent, Measurements, QueueEntry } from "../src/api.js";

export function measurements(overrides: Partial<Measurements> = {}): Measurements {
  return { rel: 10, vote: 100, type: 0, div: 2, con: 5, epr: 1, ...overrides };
}

export function entry(id: string, p: number, overrides: Partial<QueueEntry> = {}): QueueEntry {
  return {
    idea_id: id,
    title: `Idea ${id}`,
    p,
    status: "pending",
    posted_date: "2008-01-01",
    measurements: measurements(),
    terms: { rt: [], kt: [] },
    decision: null,
    ...overrides,
  };
}

export function decisionEvent(id: string, label: number,
                              overrides: Partial<DecisionEvent> = {}): DecisionEvent {
  return {
    idea_id: id,
    label,
    actor: "t",
    resulting_p: 0.5,
    outcome: {
      p: 0.5, sampled_index: 0, mistake: true,
      refit_performed: true, capacity_hit: false, loss: 1.0,
    },
    initialized_model: false,
    committed: true,
    ...overrides,
  };
}

type Responder = (path: string, init?: RequestInit) => { status: number; body: unknown };

/** Client whose fetch is served by a responder function. */
export function fakeClient(responder: Responder): Client {
  const fetchFn = async (path: string, init?: RequestInit): Promise<Response> => {
    const { status, body } = responder(path, init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return new Client("", fetchFn);
}
