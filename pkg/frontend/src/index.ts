export * from './protocol.js';
export { DocumentStore, defaultState } from './store.js';
export {
  HoverTracker,
  headerView,
  labelClick,
  labelControlClick,
  curtainExpandClick,
  expandAllClick,
  closeAllClick,
  type GestureCommand,
  type HeaderView,
  type TaskLabel,
  type CurtainView,
  type PreviewEntry,
  type PreviewDetail,
  type LabelMode,
} from './headers.js';
export {
  renderScene,
  stickyNoteHeight,
  type Scene,
  type SceneNode,
  type SceneEdge,
  type SceneSection,
  type NodeShape,
} from './scene.js';
export {
  taskCards,
  placeholderCount,
  promptArityError,
  switchPromptVariant,
  editPrompt,
  toggleVisibility,
  toggleInitiative,
  deleteTask,
  startDelegation,
  confirmDelegation,
  type TaskCard,
  type TaskDraft,
} from './board.js';
export {
  PolymindClient,
  CommandRejected,
  type Transport,
  type TransportHandlers,
  type TransportFactory,
  type ClientStatus,
} from './client.js';
export { renderSvg, renderHeader, escapeXml } from './render.js';
