/**
 * Task board: one card per microtask, flippable between an identity page
 * (name, color, input/output types, global toggles) and a prompt page
 * (editable templates with variant switching), plus the add-card delegation
 * flow where the engine suggests a name and prompt for confirmation.
 *
 * Validation the registry would reject is caught inline first — the card
 * shows the violation and sends nothing — but the engine stays authoritative:
 * anything sent is still its call.
 */

import type { Initiative, InputType, OutputType, PromptJson } from './protocol.js';
import type { GestureCommand } from './headers.js';
import { DocumentStore } from './store.js';

const PLACEHOLDER = '[placeholder]';

export interface TaskCard {
  taskId: string;
  /** Page 1: identity and global toggles. */
  name: string;
  color: string;
  inputType: InputType;
  outputType: OutputType;
  visible: boolean;
  initiative: Initiative;
  /** Page 2: prompt variants. */
  prompts: PromptJson[];
  activePrompt: number;
}

export function taskCards(store: DocumentStore): TaskCard[] {
  return [...store.tasks.values()].map((task) => ({
    taskId: task.id,
    name: task.name,
    color: task.color,
    inputType: task.input_type,
    outputType: task.output_type,
    visible: task.visible,
    initiative: task.initiative,
    prompts: task.prompts.map((p) => ({ ...p })),
    activePrompt: task.active_prompt,
  }));
}

/** Pair-input tasks consume two texts; everything else consumes one. */
export function placeholderCount(inputType: InputType): number {
  return inputType === 'nodes' ? 2 : 1;
}

function countPlaceholders(template: string): number {
  return template.split(PLACEHOLDER).length - 1;
}

/** Inline arity check for a prompt edit; null means the template is fine. */
export function promptArityError(
  template: string,
  inputType: InputType,
): string | null {
  const want = placeholderCount(inputType);
  const got = countPlaceholders(template);
  if (got === want) return null;
  return `prompt has ${got} placeholder(s); input type ${inputType} requires ${want}`;
}

// -- card gestures ----------------------------------------------------------

export function switchPromptVariant(
  store: DocumentStore,
  taskId: string,
  index: number,
): GestureCommand | null {
  const task = store.tasks.get(taskId);
  if (!task || index < 0 || index >= task.prompts.length) return null;
  return {
    cmd: 'update_task',
    args: { task_id: taskId, changes: { active_prompt: index } },
  };
}

/** Save a prompt edit; an arity violation renders inline and nothing sends. */
export function editPrompt(
  store: DocumentStore,
  taskId: string,
  index: number,
  label: string,
  template: string,
): { command: GestureCommand | null; error: string | null } {
  const task = store.tasks.get(taskId);
  if (!task || index < 0 || index >= task.prompts.length) {
    return { command: null, error: 'unknown prompt' };
  }
  const error = promptArityError(template, task.input_type);
  if (error) return { command: null, error };
  const prompts = task.prompts.map((p, i) =>
    i === index ? { label, template } : { ...p },
  );
  return {
    command: { cmd: 'update_task', args: { task_id: taskId, changes: { prompts } } },
    error: null,
  };
}

export function toggleVisibility(
  store: DocumentStore,
  taskId: string,
): GestureCommand | null {
  const task = store.tasks.get(taskId);
  if (!task) return null;
  return {
    cmd: 'set_visibility',
    args: { task_id: taskId, visible: !task.visible },
  };
}

/** Global initiative toggle (the per-node override lives on the header). */
export function toggleInitiative(
  store: DocumentStore,
  taskId: string,
): GestureCommand | null {
  const task = store.tasks.get(taskId);
  if (!task) return null;
  const next: Initiative = task.initiative === 'proactive' ? 'reactive' : 'proactive';
  return { cmd: 'set_initiative', args: { task_id: taskId, mode: next } };
}

/** Deletion is destructive (hollow candidates vanish); the card double-asks. */
export function deleteTask(confirmed: boolean, taskId: string): GestureCommand | null {
  if (!confirmed) return null;
  return { cmd: 'delete_task', args: { task_id: taskId } };
}

// -- delegation flow ----------------------------------------------------------

/** Draft spec the engine suggests; the user edits it on the card, then
 * confirms. Shape matches the confirm_task `spec` argument. */
export interface TaskDraft {
  name: string;
  color: string;
  input_type: InputType;
  output_type: OutputType;
  prompts: PromptJson[];
  active_prompt: number;
  initiative: Initiative;
  visible: boolean;
}

/** Step 1: ask the engine for a suggested name and example prompt. The ack
 * arrives once the suggestion job finishes, carrying {draft}. */
export function startDelegation(nameHint?: string): GestureCommand {
  return {
    cmd: 'suggest_task',
    args: nameHint ? { name: nameHint } : {},
  };
}

/** Step 2: confirm the (possibly edited) draft. Arity violations are caught
 * inline per prompt; a clean draft becomes one confirm_task command. */
export function confirmDelegation(
  draft: TaskDraft,
  edits: Partial<TaskDraft> = {},
): { command: GestureCommand | null; error: string | null } {
  const spec: TaskDraft = { ...draft, ...edits };
  if (!spec.name.trim()) return { command: null, error: 'name must be non-empty' };
  if (spec.prompts.length === 0) {
    return { command: null, error: 'at least one prompt is required' };
  }
  for (const prompt of spec.prompts) {
    const error = promptArityError(prompt.template, spec.input_type);
    if (error) return { command: null, error: `prompt '${prompt.label}': ${error}` };
  }
  return {
    command: { cmd: 'confirm_task', args: { spec } },
    error: null,
  };
}
