// Typed client for the sharing service. Every error response has the
// shape {code, message, details}; ApiError carries it so views can show
// the code and per-line compile details.

export interface FortressRecord {
  id: number;
  name: string;
  author: string;
  notes: string;
  text: string;
  parent_id: number | null;
  created_at: number;
  play_count: number;
  has_player: boolean;
}

export interface ErrorDetail {
  code: string;
  line: number;
  message: string;
}

export interface BackpackNode {
  index: number;
  kind: string;
  target: string | null;
}

export interface BackpackEdge {
  src: number;
  dst: number;
  kind: string;
  target: string | null;
  count: number | null;
}

export interface BackpackClass {
  char: string;
  name: string;
  nodes: BackpackNode[];
  edges: BackpackEdge[];
}

export class ApiError extends Error {
  code: string;
  status: number;
  details: ErrorDetail[];

  constructor(status: number, code: string, message: string, details: ErrorDetail[]) {
    super(message);
    this.status = status;
    this.code = code;
    this.details = details;
  }
}

export class ApiClient {
  base: string;
  token: string | null = null;

  constructor(base = "") {
    this.base = base;
  }

  private async request<T>(
    method: string,
    path: string,
    body: unknown = undefined,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const code = typeof payload.code === "string" ? payload.code : "HttpError";
      const message =
        typeof payload.message === "string" ? payload.message : response.statusText;
      const details = Array.isArray(payload.details) ? payload.details : [];
      throw new ApiError(response.status, code, message, details);
    }
    return payload as T;
  }

  recent(limit = 120): Promise<FortressRecord[]> {
    return this.request("GET", `/api/fortress?limit=${limit}`);
  }

  get(id: number): Promise<FortressRecord> {
    return this.request("GET", `/api/fortress/${id}`);
  }

  submit(text: string, parentId: number | null = null): Promise<FortressRecord> {
    return this.request("POST", "/api/fortress", { text, parent_id: parentId });
  }

  lineage(id: number): Promise<number[]> {
    return this.request<{ lineage: number[] }>(
      "GET",
      `/api/fortress/${id}/lineage`,
    ).then((r) => r.lineage);
  }

  recordPlay(id: number): Promise<{ id: number; play_count: number }> {
    return this.request("POST", `/api/fortress/${id}/play`);
  }

  search(user: string | null, name: string | null): Promise<FortressRecord[]> {
    const params = new URLSearchParams();
    if (user) params.set("user", user);
    if (name) params.set("name", name);
    return this.request("GET", `/api/search?${params.toString()}`);
  }

  nodeStats(): Promise<Record<string, number>> {
    return this.request("GET", "/api/stats/nodes");
  }

  register(username: string, password: string): Promise<{ username: string }> {
    return this.request("POST", "/api/users/register", { username, password });
  }

  async login(username: string, password: string): Promise<string> {
    const { token } = await this.request<{ token: string }>("POST", "/api/users/login", {
      username,
      password,
    });
    this.token = token;
    return token;
  }

  logout(): void {
    this.token = null;
  }

  backpack(): Promise<BackpackClass[]> {
    return this.request<{ backpack: BackpackClass[] }>("GET", "/api/backpack").then(
      (r) => r.backpack,
    );
  }

  backpackAdd(fortressId: number, entityChar: string): Promise<BackpackClass[]> {
    return this.request<{ backpack: BackpackClass[] }>("POST", "/api/backpack", {
      fortress_id: fortressId,
      entity_char: entityChar,
    }).then((r) => r.backpack);
  }
}
