import java.util.Map;
@Override
public static final <K, V> V lookup(Map<K, V> table, K key) {
    V value = table.get(key);
    return value;
}
